//! Functional codes of quadrics: quadratic forms evaluated at the rational
//! points of a quadric of P^3(F_q).

use std::collections::BTreeMap;
use std::sync::Arc;

use serde::Serialize;

use crate::budget::Budget;
use crate::error::{domain, Result};
use crate::gf::{Fe, Gf};
use crate::pencils::{QuadraticForm, P3};
use crate::projspace::{point_index, rank, ProjPoint};
use crate::veronese::vmap_raw;

#[derive(Clone, Debug)]
pub struct FunctionalCode {
    gf: Arc<Gf>,
    pub quadric: QuadraticForm,
    /// Evaluation points in the order of [`crate::projspace::enumerate_points`].
    pub points: Vec<ProjPoint>,
    /// Row (i, j) holds x_i x_j at every evaluation point.
    pub generator: Vec<Vec<Fe>>,
    pub k: usize,
}

impl FunctionalCode {
    pub fn n(&self) -> usize {
        self.points.len()
    }

    pub fn gf(&self) -> &Gf {
        &self.gf
    }
}

pub fn build_code(gf: Arc<Gf>, quadric: &QuadraticForm) -> Result<FunctionalCode> {
    if quadric.is_zero() {
        return domain("the zero form does not define a quadric");
    }
    let space = P3::new(gf.clone());
    let points: Vec<ProjPoint> = space.zeros(quadric).into_iter().map(|i| space.points()[i].clone()).collect();
    let cols: Vec<Vec<Fe>> = points.iter().map(|p| vmap_raw(&gf, p.coords())).collect();
    let generator: Vec<Vec<Fe>> = (0..10).map(|r| cols.iter().map(|c| c[r]).collect()).collect();
    let k = rank(&gf, &generator);
    Ok(FunctionalCode { gf, quadric: quadric.clone(), points, generator, k })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum WeightMethod {
    /// n − |X ∩ Z(f)| from the zero set of f in P^3.
    Geometric,
    /// Nonzero entries of the codeword c·G.
    Generator,
}

/// Weights over the q^10 − 1 nonzero forms taken up to scalar; forms
/// vanishing on the whole quadric contribute weight 0.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct WeightDistribution {
    pub n: usize,
    pub k: usize,
    pub weights: BTreeMap<usize, u64>,
}

impl WeightDistribution {
    pub fn to_json(&self) -> serde_json::Value {
        let w: serde_json::Map<String, serde_json::Value> =
            self.weights.iter().map(|(k, v)| (k.to_string(), serde_json::Value::from(*v))).collect();
        serde_json::json!({ "n": self.n, "k": self.k, "weights": w })
    }

    pub fn total(&self) -> u64 {
        self.weights.values().sum()
    }
}

/// Calls `visit` on every nonzero vector of F_q^10 with leading entry 1.
fn for_each_message(q: usize, budget: &Budget, mut visit: impl FnMut(&[Fe])) -> Result<()> {
    let mut nodes = 0u64;
    for lead in 0..10 {
        let mut c = vec![Fe::ZERO; 10];
        c[lead] = Fe::ONE;
        loop {
            nodes += 1;
            budget.check(nodes, "weight distribution")?;
            visit(&c);
            let mut pos = 10;
            let mut done = true;
            while pos > lead + 1 {
                pos -= 1;
                let next = c[pos].0 as usize + 1;
                if next < q {
                    c[pos] = Fe(next as u16);
                    done = false;
                    break;
                }
                c[pos] = Fe::ZERO;
            }
            if done {
                break;
            }
        }
    }
    Ok(())
}

pub fn weight_distribution(code: &FunctionalCode, method: WeightMethod, budget: &Budget) -> Result<WeightDistribution> {
    let gf = code.gf();
    let n = code.n();
    let mut weights: BTreeMap<usize, u64> = BTreeMap::new();
    match method {
        WeightMethod::Geometric => {
            let space = P3::new(code.gf.clone());
            let on_x: Vec<bool> = {
                let mut v = vec![false; space.points().len()];
                for p in &code.points {
                    v[point_index(gf.q(), p.coords())] = true;
                }
                v
            };
            for_each_message(gf.q(), budget, |c| {
                let f = QuadraticForm::new(c.to_vec()).expect("ten coefficients");
                let meet = space.zeros(&f).into_iter().filter(|&i| on_x[i]).count();
                *weights.entry(n - meet).or_insert(0) += 1;
            })?;
        }
        WeightMethod::Generator => {
            for_each_message(gf.q(), budget, |c| {
                let mut word = vec![Fe::ZERO; n];
                for (ci, row) in c.iter().zip(&code.generator) {
                    if ci.is_zero() {
                        continue;
                    }
                    for (w, &g) in word.iter_mut().zip(row) {
                        *w = gf.mul_add(*w, *ci, g);
                    }
                }
                *weights.entry(word.iter().filter(|x| !x.is_zero()).count()).or_insert(0) += 1;
            })?;
        }
    }
    Ok(WeightDistribution { n, k: code.k, weights })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pencils::QuadricClass;

    fn code(q: u32, c: QuadricClass) -> FunctionalCode {
        let gf = Arc::new(Gf::with_order(q).unwrap());
        let f = c.representative(&gf);
        build_code(gf, &f).unwrap()
    }

    #[test]
    fn code_lengths() {
        assert_eq!(code(2, QuadricClass::Hyperbolic).n(), 9);
        assert_eq!(code(2, QuadricClass::Elliptic).n(), 5);
        assert_eq!(code(3, QuadricClass::Elliptic).n(), 10);
        // a quadric on 9 points of P^3_2 lies in a single quadric: k = 9
        assert_eq!(code(2, QuadricClass::Hyperbolic).k, 9);
    }

    #[test]
    fn methods_agree_at_q2() {
        for c in QuadricClass::ALL {
            let code = code(2, c);
            let a = weight_distribution(&code, WeightMethod::Geometric, &Budget::unlimited()).unwrap();
            let b = weight_distribution(&code, WeightMethod::Generator, &Budget::unlimited()).unwrap();
            assert_eq!(a, b, "{c}");
            assert_eq!(a.total(), 1023);
            // weight 0 exactly for the forms in the kernel: (q^(10-k) - 1)/(q - 1)
            assert_eq!(a.weights.get(&0).copied().unwrap_or(0), (1u64 << (10 - code.k)) - 1);
        }
    }
}
