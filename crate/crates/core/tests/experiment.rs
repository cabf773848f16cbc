use std::fs;
use std::path::PathBuf;

use ltlf_rl::experiment::{
    compile_task, matrix, presets, read_runs, run_matrix, summarize, write_runs, EnvSpec, ExperimentError, RunOptions, RunSpec,
    TaskFile,
};

fn tasks_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../tasks")
}

fn small(mut task: TaskFile) -> TaskFile {
    task.total_steps = Some(1500);
    task.train.learning_starts = 200;
    task.alphas.clear();
    task
}

#[test]
fn shipped_task_files_match_presets() {
    let presets = presets::all();
    let mut names: Vec<String> = fs::read_dir(tasks_dir())
        .unwrap()
        .map(|e| e.unwrap().file_name().into_string().unwrap())
        .filter(|n| n.ends_with(".json"))
        .collect();
    names.sort();
    assert_eq!(names.len(), presets.len());
    for p in presets {
        let path = tasks_dir().join(format!("{}.json", p.name));
        let text = fs::read_to_string(&path).unwrap();
        assert_eq!(TaskFile::from_json(&text).unwrap(), p);
        assert_eq!(text, p.to_json() + "\n", "{}", path.display());
    }
}

#[test]
fn benchmark_automata_have_expected_sizes() {
    let sizes: Vec<usize> = (1..=6)
        .map(|n| compile_task(&presets::benchmark(n).unwrap()).unwrap().dfa.num_states())
        .collect();
    assert_eq!(sizes, vec![5, 8, 17, 4, 6, 8]);
    for n in 1..=6 {
        let c = compile_task(&presets::benchmark(n).unwrap()).unwrap();
        assert_eq!(c.ranks.unwrap().n, 4);
    }
}

#[test]
fn artifacts_are_byte_identical_across_compiles() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let task = presets::benchmark(3).unwrap();
    compile_task(&task).unwrap().write_artifacts(a.path(), task.reward).unwrap();
    compile_task(&task).unwrap().write_artifacts(b.path(), task.reward).unwrap();
    for f in ["dfa.json", "dfa.dot", "task.rddl", "ranks.json"] {
        let x = fs::read(a.path().join(f)).unwrap();
        assert!(!x.is_empty());
        assert_eq!(x, fs::read(b.path().join(f)).unwrap(), "{f}");
    }
}

#[test]
fn requested_category_count_is_clamped() {
    let mut task = presets::benchmark(4).unwrap();
    task.n = Some(9);
    let c = compile_task(&task).unwrap();
    assert_eq!(c.clamped_n, Some((9, 4)));
    assert!(c.describe().contains("clamped"));
}

#[test]
fn malformed_task_files_are_config_errors() {
    assert!(matches!(TaskFile::from_json("{"), Err(ExperimentError::Config(_))));
    let mut task = presets::gridworld_red_green();
    task.formula = "F (g &".into();
    assert!(compile_task(&task).is_err());
    task.formula = "F x".into();
    assert!(compile_task(&task).is_err());
    assert!(TaskFile::load(&tasks_dir().join("missing.json")).is_err());
}

#[test]
fn matrix_crosses_strategies_seeds_and_exponents() {
    let mut task = presets::gridworld_task1();
    task.alphas = vec![0.0, task.alpha, 1.5];
    let seeds: Vec<u64> = (0..10).collect();
    let m = matrix(&task, &["BASE".into(), "ec".into()], &seeds);
    assert_eq!(m.len(), 10 + 3 * 10);
    assert!(m.iter().all(|s| s.strategy == "BASE" || s.strategy == "EC"));
    assert_eq!(m.iter().filter(|s| s.strategy == "EC" && s.alpha == 1.5).count(), 10);
}

#[test]
fn runs_round_trip_and_summary_is_a_function_of_the_csvs() {
    let task = small(presets::gridworld_task1());
    let compiled = compile_task(&task).unwrap();
    let seeds: Vec<u64> = (0..10).collect();
    let specs = matrix(&task, &["BASE".into(), "EC".into()], &seeds);
    let runs = run_matrix(&task, &compiled, &specs, 2, RunOptions::default()).unwrap();
    assert_eq!(runs.iter().map(|(s, _)| s.clone()).collect::<Vec<_>>(), specs);

    let dir = tempfile::tempdir().unwrap();
    write_runs(&dir.path().join("runs"), &runs).unwrap();
    let csvs = fs::read_dir(dir.path().join("runs")).unwrap().count();
    assert_eq!(csvs, 20);

    let mut back = read_runs(&dir.path().join("runs")).unwrap();
    let mut orig = runs.clone();
    let key = |r: &(RunSpec, _)| r.0.file_name();
    orig.sort_by_key(key);
    back.sort_by_key(key);
    assert_eq!(back, orig);

    let censor = task.train_config("BASE", 0, task.alpha).total_steps + 1;
    let s1 = summarize(&runs, censor);
    let s2 = summarize(&back, censor);
    assert_eq!(s1, s2);
    assert_eq!(s1.groups.len(), 2);
    assert!(s1.groups.iter().all(|g| g.runs == 10));
    s1.write(dir.path()).unwrap();
    for f in ["summary.csv", "curve_episodes.csv", "curve_steps.csv"] {
        assert!(dir.path().join(f).is_file(), "{f}");
    }

    // re-running the same matrix on a different thread count reproduces it
    let again = run_matrix(&task, &compiled, &specs, 1, RunOptions::default()).unwrap();
    assert_eq!(again, runs);
}

#[test]
fn env_specs_build_for_every_preset() {
    for task in presets::all() {
        let env = task.env.build(0).unwrap();
        let props = env.propositions();
        let atoms = compile_task(&task).unwrap().atoms;
        for a in atoms.names() {
            assert!(props.iter().any(|p| p == a), "{}: {a}", task.name);
        }
        assert!(task.env.default_horizon() > 0);
        if let EnvSpec::Gridworld(_) = task.env {
            assert!(env.as_tabular().is_some());
        }
    }
}
