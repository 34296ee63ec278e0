use ftomo::entanglement::kerr_zero_limit_entropy;
use ftomo::figures::{figure, FigureGrids};
use ftomo::grid::StepRange;
use ftomo::Complex64 as C64;

fn small_grids() -> FigureGrids {
    FigureGrids {
        x: StepRange::new(0.1, 3.0, 0.1).unwrap(),
        lambda: StepRange::new(0.25, 2.0, 0.25).unwrap(),
        alpha1: StepRange::new(0.0, 2.0, 0.25).unwrap(),
        ..FigureGrids::default()
    }
}

#[test]
fn every_figure_stays_in_range() {
    let g = small_grids();
    for id in 1..=5 {
        let t = figure(id, &g).unwrap();
        assert_eq!(t.range_violations(), 0, "figure {id}");
        assert!(!t.rows.is_empty());
        assert!(t.rows.iter().all(|r| r.len() == t.header.len()));
    }
}

#[test]
fn kerr_figure_starts_at_closed_form() {
    let t = figure(2, &small_grids()).unwrap();
    let mut buf = Vec::new();
    t.write_csv(&mut buf).unwrap();
    let text = String::from_utf8(buf).unwrap();
    let first = text.lines().nth(1).unwrap();
    let fields: Vec<f64> = first.split(',').map(|f| f.parse().unwrap()).collect();
    assert_eq!(fields[0], 0.0);
    let expect = kerr_zero_limit_entropy(C64::new(fields[1], 0.0), C64::new(fields[2], 0.0));
    assert!((fields[3] - expect).abs() < 1e-15);
}

#[test]
fn csv_is_reproducible() {
    let g = small_grids();
    let render = |id| {
        let mut buf = Vec::new();
        figure(id, &g).unwrap().write_csv(&mut buf).unwrap();
        buf
    };
    for id in [1, 3, 5] {
        assert_eq!(render(id), render(id));
    }
}

#[test]
fn bad_grids_rejected() {
    let g = FigureGrids { lambda: StepRange::new(0.0, 1.0, 0.5).unwrap(), ..FigureGrids::default() };
    assert!(figure(2, &g).is_err());
    assert!(figure(6, &FigureGrids::default()).is_err());
}
