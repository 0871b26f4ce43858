use nilrec::ergodic_avg::AverageFactor;
use nilrec::reclab::{class_scan, rotation_skew_config, to_f64, Intersections};
use nilrec::*;
use num_complex::Complex64;

fn registry() -> GeneratorRegistry {
    GeneratorRegistry::default().with("alpha", "sqrt(2)-1").unwrap().with("beta", "sqrt(3)-1").unwrap()
}

// Cells misclassified by midpoint quadrature sit within half a cell of the
// boundary of one of the ℓ+1 translated boxes.
#[test]
fn grid_refinement_is_stable() {
    let reg = registry();
    let coarse = rotation_skew_config().unwrap().with_grid(32);
    let fine = coarse.clone().with_grid(64);
    let perimeter: f64 = {
        let iv = coarse.set.intervals();
        (0..iv.len())
            .map(|i| 2.0 * iv.iter().enumerate().filter(|&(j, _)| j != i).map(|(_, (lo, hi))| to_f64(&(hi - lo))).product::<f64>())
            .sum()
    };
    let bound = 2.0 * coarse.ell() as f64 * perimeter / 32.0;
    let (a, b) = (Intersections::new(&coarse, &reg).unwrap(), Intersections::new(&fine, &reg).unwrap());
    let mut worst = 0.0f64;
    for m in 0..15 {
        for n in 0..15 {
            let d = to_f64(&(a.measure(m, n).unwrap() - b.measure(m, n).unwrap())).abs();
            worst = worst.max(d);
        }
    }
    assert!(worst <= bound, "worst {worst} > {bound}");
    assert!(worst > 0.0);
}

#[test]
fn scan_reports_agree_across_executors() {
    let reg = registry();
    let cfg = rotation_skew_config().unwrap().with_schedule(vec![100, 300]).with_grid(32);
    let seq = recurrence_scan(&cfg, &reg, Exec::Sequential).unwrap();
    let par = recurrence_scan(&cfg, &reg, Exec::Parallel).unwrap();
    assert_eq!(seq, par);
    assert_eq!(seq.to_csv(), par.to_csv());
}

#[test]
fn averages_are_bitwise_equal_across_executors() {
    let reg = registry();
    let systems = reclab::rotation_skew_pair().unwrap();
    let f = TrigPoly::from_records(1, 2, &[observable::TermRecord { l: vec![1, 1], j: 0, re: 1.0, im: 0.5 }]).unwrap();
    let factors = vec![
        AverageFactor::new(systems[0].clone(), Point::origin(2), IntPolynomial::var_n()),
        AverageFactor::new(systems[1].clone(), Point::origin(2), IntPolynomial::parse("n^2").unwrap()),
    ];
    let obs = vec![Observable::from(f.clone()), Observable::from(f)];
    let bx = FolnerBox::new(1500, BoxRule::Default, 2);
    let s: Complex64 = multiple_average(&factors, &obs, &bx, &reg, Exec::Sequential).unwrap();
    let p: Complex64 = multiple_average(&factors, &obs, &bx, &reg, Exec::Parallel).unwrap();
    assert_eq!((s.re.to_bits(), s.im.to_bits()), (p.re.to_bits(), p.im.to_bits()));
}

#[test]
fn class_counts_reassemble_the_full_box() {
    let reg = registry();
    let cfg = rotation_skew_config().unwrap().with_grid(32);
    for r in [2, 3] {
        let (full, classes) = class_scan(&cfg, 400, r, &reg, Exec::Parallel).unwrap();
        assert_eq!(classes.len() as i64, r * r);
        assert_eq!(classes.iter().map(|c| c.good).sum::<u64>(), full.good);
        assert_eq!(classes.iter().map(|c| c.total).sum::<u64>(), full.total);
    }
}
