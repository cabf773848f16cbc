//! Per-episode training log and the summary statistics derived from it.

use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpisodeRecord {
    pub episode: usize,
    /// Environment steps taken so far, including this episode.
    pub steps: usize,
    pub raw_return: f64,
    pub shaped_return: f64,
    pub success: bool,
    pub ep_length: usize,
    pub buffer_sizes: Vec<usize>,
    pub probs: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct MetricsLog {
    pub strategy: String,
    pub shaping: bool,
    pub replay: String,
    pub episodes: Vec<EpisodeRecord>,
}

fn join<T: ToString>(v: &[T]) -> String {
    v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(";")
}

fn split<T: std::str::FromStr>(s: &str) -> Result<Vec<T>, String> {
    if s.is_empty() {
        return Ok(Vec::new());
    }
    s.split(';').map(|x| x.parse().map_err(|_| format!("bad list entry '{x}'"))).collect()
}

pub const CSV_HEADER: [&str; 11] = [
    "episode",
    "steps",
    "rawReturn",
    "shapedReturn",
    "success",
    "epLength",
    "bufferSizes",
    "P",
    "strategy",
    "shaping",
    "replay",
];

impl MetricsLog {
    pub fn write_csv<W: Write>(&self, out: W) -> csv::Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(CSV_HEADER)?;
        for e in &self.episodes {
            w.write_record([
                e.episode.to_string(),
                e.steps.to_string(),
                e.raw_return.to_string(),
                e.shaped_return.to_string(),
                (e.success as u8).to_string(),
                e.ep_length.to_string(),
                join(&e.buffer_sizes),
                join(&e.probs),
                self.strategy.clone(),
                self.shaping.to_string(),
                self.replay.clone(),
            ])?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn read_csv<R: Read>(input: R) -> Result<Self, String> {
        let mut r = csv::Reader::from_reader(input);
        let mut log = MetricsLog::default();
        for rec in r.records() {
            let rec = rec.map_err(|e| e.to_string())?;
            let f = |i: usize| rec.get(i).ok_or_else(|| format!("missing column {}", CSV_HEADER[i]));
            let num = |i: usize| -> Result<f64, String> { f(i)?.parse().map_err(|_| format!("bad {}", CSV_HEADER[i])) };
            log.strategy = f(8)?.to_string();
            log.shaping = f(9)? == "true";
            log.replay = f(10)?.to_string();
            log.episodes.push(EpisodeRecord {
                episode: num(0)? as usize,
                steps: num(1)? as usize,
                raw_return: num(2)?,
                shaped_return: num(3)?,
                success: f(4)? == "1",
                ep_length: num(5)? as usize,
                buffer_sizes: split(f(6)?)?,
                probs: split(f(7)?)?,
            });
        }
        Ok(log)
    }

    pub fn total_steps(&self) -> usize {
        self.episodes.last().map_or(0, |e| e.steps)
    }

    /// Step count at the end of the first successful episode, or
    /// `censor` if none succeeded.
    pub fn steps_to_first_success(&self, censor: usize) -> usize {
        self.episodes.iter().find(|e| e.success).map_or(censor, |e| e.steps)
    }

    /// Raw reward collected per environment step, times 1000.
    pub fn reward_per_kstep(&self) -> f64 {
        let steps = self.total_steps();
        if steps == 0 {
            return 0.0;
        }
        1000.0 * self.episodes.iter().map(|e| e.raw_return).sum::<f64>() / steps as f64
    }

    /// Step count at which the success rate over the trailing `window`
    /// episodes first reaches `threshold`, or `censor`.
    pub fn steps_to_success_rate(&self, threshold: f64, window: usize, censor: usize) -> usize {
        let mut hits = 0usize;
        for (i, e) in self.episodes.iter().enumerate() {
            hits += e.success as usize;
            if i >= window {
                hits -= self.episodes[i - window].success as usize;
            }
            if i + 1 >= window && hits as f64 >= threshold * window as f64 {
                return e.steps;
            }
        }
        censor
    }

    pub fn success_rate(&self) -> f64 {
        if self.episodes.is_empty() {
            return 0.0;
        }
        self.episodes.iter().filter(|e| e.success).count() as f64 / self.episodes.len() as f64
    }
}

/// Median of `v`; the mean of the middle pair for even lengths.
pub fn median(v: &[f64]) -> f64 {
    if v.is_empty() {
        return f64::NAN;
    }
    let mut s = v.to_vec();
    s.sort_by(|a, b| a.total_cmp(b));
    let m = s.len() / 2;
    if s.len() % 2 == 1 {
        s[m]
    } else {
        (s[m - 1] + s[m]) / 2.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rec(episode: usize, steps: usize, success: bool) -> EpisodeRecord {
        EpisodeRecord {
            episode,
            steps,
            raw_return: if success { 100.0 } else { 0.0 },
            shaped_return: 0.5,
            success,
            ep_length: 10,
            buffer_sizes: vec![1, 2],
            probs: vec![0.25, 0.75],
        }
    }

    #[test]
    fn csv_round_trip() {
        let log = MetricsLog {
            strategy: "EC".into(),
            shaping: true,
            replay: "classified".into(),
            episodes: vec![rec(0, 10, false), rec(1, 20, true)],
        };
        let mut buf = Vec::new();
        log.write_csv(&mut buf).unwrap();
        assert_eq!(MetricsLog::read_csv(buf.as_slice()).unwrap(), log);
    }

    #[test]
    fn summary_statistics() {
        let log = MetricsLog {
            episodes: vec![rec(0, 10, false), rec(1, 20, true), rec(2, 30, true), rec(3, 40, true)],
            ..Default::default()
        };
        assert_eq!(log.steps_to_first_success(99), 20);
        assert_eq!(log.steps_to_success_rate(0.8, 2, 99), 30);
        assert_eq!(log.steps_to_success_rate(1.0, 4, 99), 99);
        assert!((log.reward_per_kstep() - 7500.0).abs() < 1e-9);
        assert_eq!(median(&[3.0, 1.0, 2.0]), 2.0);
        assert_eq!(median(&[4.0, 1.0, 2.0, 3.0]), 2.5);
    }
}
