mod common;

use waring_core::pencils::{classify_quadric, enumerate_eta7, eta7_subset_dfs, named_pencils, Eta7Mode, QuadraticForm};
use waring_core::{Budget, Fe, Gf};

fn eval_mod(p: i64, f: &[i64], v: &[i64]) -> i64 {
    let mut k = 0;
    let mut s = 0;
    for i in 0..4 {
        for j in i..4 {
            s += f[k] * v[i] * v[j];
            k += 1;
        }
    }
    s.rem_euclid(p)
}

fn forms(p: i64) -> impl Iterator<Item = Vec<i64>> {
    let total = (p as usize).pow(10);
    (1..total).map(move |code| (0..10).map(|k| ((code / (p as usize).pow(k)) % p as usize) as i64).collect())
}

#[test]
fn eight_point_bases_over_f2() {
    let masks = eta7_subset_dfs(2, &Budget::unlimited()).unwrap();
    let report = enumerate_eta7(2, Eta7Mode::Exhaustive, &Budget::unlimited()).unwrap();
    assert_eq!(masks.len(), report.bases);
    assert_eq!(masks.len(), 2520);
    let pts = common::points(2, 3);
    let all_forms: Vec<Vec<i64>> = forms(2).collect();
    for m in &masks {
        let chosen: Vec<&Vec<i64>> = (0..pts.len()).filter(|&i| m[i / 64] >> (i % 64) & 1 == 1).map(|i| &pts[i]).collect();
        assert_eq!(chosen.len(), 8);
        // exactly a pencil of forms vanishes on the eight points
        let through: Vec<&Vec<i64>> = all_forms.iter().filter(|f| chosen.iter().all(|v| eval_mod(2, f, v) == 0)).collect();
        assert_eq!(through.len(), 3);
        // and the pencil's base is the eight points
        let base = pts.iter().filter(|v| through.iter().all(|f| eval_mod(2, f, v) == 0)).count();
        assert_eq!(base, 8);
    }
}

#[test]
fn quadric_classes_match_point_counts_over_f3() {
    let gf = Gf::with_order(3).unwrap();
    let pts = common::points(3, 3);
    for f in forms(3) {
        let n = pts.iter().filter(|v| eval_mod(3, &f, v) == 0).count();
        let form = QuadraticForm::new(f.iter().map(|&c| Fe(c as u16)).collect()).unwrap();
        let class = classify_quadric(&gf, &form).unwrap();
        assert_eq!(class.expected_points(3), n, "{f:?}");
    }
}

#[test]
fn named_pencil_bases_over_f3() {
    let pts = common::points(3, 3);
    // terms look like X0X2 or 2X1^2, coefficients being element codes
    let parse = |s: &str| -> Vec<i64> {
        let mut c = vec![0i64; 10];
        for term in s.split('+') {
            let at = term.find('X').unwrap();
            let coef = if at == 0 { 1 } else { term[..at].parse().unwrap() };
            let idx: Vec<usize> = term[at..].split('X').filter(|t| !t.is_empty()).map(|t| t[..1].parse().unwrap()).collect();
            let (i, j) = if idx.len() == 1 { (idx[0], idx[0]) } else { (idx[0], idx[1]) };
            c[(0..i).map(|r| 4 - r).sum::<usize>() + j - i] = coef;
        }
        c
    };
    for row in named_pencils(3).unwrap() {
        let (f, g) = (parse(&row.f), parse(&row.g));
        let base = pts.iter().filter(|v| eval_mod(3, &f, v) == 0 && eval_mod(3, &g, v) == 0).count();
        assert_eq!(base, row.base_size, "{}", row.case);
        if row.identifiable {
            assert_eq!(row.span_dim + 1, row.base_size as isize, "{}", row.case);
        }
    }
}
