use pidga::experiment::{
    emit_csv, emit_plots, run_single, run_sweep, simulate_gains, ExperimentConfig, Method, PlotMetric, ReferenceData,
    INDICES_FILE, MEASURES_FILE,
};
use pidga::metrics::{indices, ObjectiveKind};

fn small() -> ExperimentConfig {
    ExperimentConfig::parse(
        "delays = 0.05, 0.25, 1\n\
         objectives = mse, itae\n\
         pop_size = 16\n\
         generations = 10\n\
         seed = 3\n",
    )
    .unwrap()
}

fn count(haystack: &str, needle: &str) -> usize {
    haystack.matches(needle).count()
}

#[test]
fn tables_and_plots_layout() {
    let cfg = small();
    let report = run_sweep(&cfg).unwrap();
    assert_eq!(report.rows.len(), 3 * 3);
    assert_eq!(report.invalid_rows(), 0);

    let dir = tempfile::tempdir().unwrap();
    emit_csv(&report, dir.path()).unwrap();
    let measures = std::fs::read_to_string(dir.path().join(MEASURES_FILE)).unwrap();
    assert_eq!(measures.lines().count(), 1 + 3);
    let table = std::fs::read_to_string(dir.path().join(INDICES_FILE)).unwrap();
    assert_eq!(table.lines().count(), 1 + 9 + 3);
    assert_eq!(table.lines().filter(|l| l.starts_with("average,")).count(), 3);

    let reference =
        ReferenceData::from_reader("method,delay,po,rt\nIterative,0.05,20,0.3\nIterative,1,5,1.5\n".as_bytes())
            .unwrap();
    let files = emit_plots(&report, dir.path(), Some(&reference)).unwrap();
    assert_eq!(files.len(), 10);
    for metric in PlotMetric::ALL {
        let svg = std::fs::read_to_string(dir.path().join(metric.file_name())).unwrap();
        assert!(svg.contains(r#"viewBox="0 0 800 600""#));
        assert_eq!(count(&svg, r#"<polyline class="series""#), 3, "{metric:?}");
        for line in svg.lines().filter(|l| l.contains(r#"class="series""#)) {
            let points = line.split("points=\"").nth(1).unwrap().trim_end_matches("\"/>");
            assert_eq!(points.split(' ').count(), 3, "{metric:?}");
        }
        let refs = usize::from(matches!(metric, PlotMetric::PercentOvershoot | PlotMetric::RiseTime));
        assert_eq!(count(&svg, r#"<polyline class="reference""#), refs, "{metric:?}");
        let scale = if metric == PlotMetric::RiseTime { "log" } else { "linear" };
        assert!(svg.contains(&format!(r#"data-y-scale="{scale}""#)), "{metric:?}");
        assert!(count(&svg, r#"class="tick-label""#) >= 3);
    }
}

#[test]
fn rows_reproduce_their_indices() {
    let cfg = small();
    let report = run_sweep(&cfg).unwrap();
    for row in &report.rows {
        let again = indices(&simulate_gains(&cfg, row.delay, &row.gains).unwrap());
        for k in ObjectiveKind::ALL {
            let (a, b) = (again.get(k), row.indices.get(k));
            assert!((a - b).abs() <= 1e-9 * b.abs().max(1.0), "{} {}: {a} vs {b}", row.delay, row.method);
        }
    }
}

#[test]
fn single_case_restriction() {
    let cfg = small();
    let report = run_single(&cfg, 0.1, ObjectiveKind::Ise).unwrap();
    let methods: Vec<Method> = report.rows.iter().map(|r| r.method).collect();
    assert_eq!(methods, vec![Method::ZieglerNichols, Method::Ga(ObjectiveKind::Ise)]);
    let zn = &report.rows[0];
    let ga = &report.rows[1];
    assert!(ga.indices.ise <= zn.indices.ise);
}
