//! Seeded property suites over every module, for quick whole-library checks.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::adic::{AdicInterval, Config, Norm, StepFunction};
use crate::correction::{lemma1_construct, lemma2_construct, verify, WalshIndex};
use crate::generate::Generator;
use crate::greedy::greedy_error_curve;
use crate::io;
use crate::walsh::{analyze, cell_exponent, synthesize, Method, PhaseTable};

#[derive(Debug, Clone)]
pub struct SuiteReport {
    pub name: &'static str,
    pub checks: usize,
    pub failures: Vec<String>,
}

impl SuiteReport {
    fn new(name: &'static str) -> Self {
        SuiteReport { name, checks: 0, failures: Vec::new() }
    }

    fn expect(&mut self, ok: bool, what: impl FnOnce() -> String) {
        self.checks += 1;
        if !ok {
            self.failures.push(what());
        }
    }

    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

pub fn run_all(seed: u64) -> Vec<SuiteReport> {
    vec![
        orthonormality(),
        transform(seed),
        greedy(seed),
        lemma1(seed),
        lemma2(seed),
        identities(),
        certificates(),
    ]
}

fn random_step(rng: &mut ChaCha8Rng, order: u32, level: u32) -> StepFunction {
    let n = (order as usize).pow(level);
    let values = (0..n)
        .map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
        .collect();
    StepFunction::new(order, level, values).expect("valid grid")
}

fn max_dev(x: &[Complex64], y: &[Complex64]) -> f64 {
    x.iter().zip(y).map(|(u, v)| (u - v).norm()).fold(0.0, f64::max)
}

fn orthonormality() -> SuiteReport {
    let mut r = SuiteReport::new("orthonormality");
    for order in 2..=5u32 {
        let level = if order == 2 { 5 } else { 2 };
        let n = (order as u64).pow(level);
        let a = order as u64;
        let table = PhaseTable::new(order);
        for i in 0..n {
            for j in 0..n {
                let g: Complex64 = (0..n)
                    .map(|c| table.get(cell_exponent(order, level, i, c) + a * a - cell_exponent(order, level, j, c) % a))
                    .sum::<Complex64>()
                    / n as f64;
                let want = if i == j { 1.0 } else { 0.0 };
                let d = (g - want).norm();
                r.expect(d < 1e-10, || format!("a={order} <psi_{i}, psi_{j}> off by {d:e}"));
            }
        }
    }
    r
}

fn transform(seed: u64) -> SuiteReport {
    let mut r = SuiteReport::new("transform");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for order in 2..=5u32 {
        for level in 1..=3u32 {
            let f = random_step(&mut rng, order, level);
            let fast = analyze(&f, Method::Fast).expect("fast");
            let naive = analyze(&f, Method::Naive).expect("naive");
            let d = max_dev(fast.coefficients(), naive.coefficients());
            r.expect(d < 1e-9, || format!("a={order} J={level}: fast vs naive {d:e}"));
            let back = synthesize(&fast, level).expect("synthesize");
            let d = max_dev(back.values(), f.values());
            r.expect(d < 1e-10, || format!("a={order} J={level}: round trip {d:e}"));
            let l2 = f.norm(Norm::L2);
            let e = (fast.energy().sqrt() - l2).abs();
            r.expect(e < 1e-10 * l2.max(1.0), || format!("a={order} J={level}: Parseval {e:e}"));
        }
    }
    r
}

fn greedy(seed: u64) -> SuiteReport {
    let mut r = SuiteReport::new("greedy");
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x9e37);
    for order in [2u32, 3] {
        let f = random_step(&mut rng, order, 2);
        let curve = greedy_error_curve(&f, usize::MAX, Norm::L2).expect("curve");
        r.expect(curve.windows(2).all(|w| w[1].error <= w[0].error + 1e-12), || {
            format!("a={order}: L2 greedy error not monotone")
        });
        let last = curve.last().map_or(f64::NAN, |p| p.error);
        r.expect(last < 1e-10, || format!("a={order}: full support error {last:e}"));
    }
    r
}

fn lemma1(seed: u64) -> SuiteReport {
    let mut r = SuiteReport::new("lemma1");
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x51);
    for _ in 0..20 {
        let order = [2u32, 3, 5][rng.random_range(0..3)];
        let m = rng.random_range(1..=2u32);
        let k = rng.random_range(0..(order as u64).pow(m));
        let eps = rng.random_range(0.05..0.9);
        let gamma = Complex64::from_polar(rng.random_range(0.1..10.0), rng.random_range(0.0..std::f64::consts::TAU));
        let n0 = rng.random_range(2..=50u64);
        let config = Config::for_order(order).expect("order");
        let d = AdicInterval::from_cell(order, m, k).expect("interval");
        match lemma1_construct(gamma, n0, eps, &d, &config) {
            Ok(res) => r.expect(res.certificate.passed(), || {
                format!("a={order} m={m} k={k} eps={eps}: {:?}", res.certificate.failures())
            }),
            Err(e) => r.expect(false, || format!("a={order} m={m} k={k} eps={eps}: {e}")),
        }
    }
    r
}

fn lemma2(seed: u64) -> SuiteReport {
    let mut r = SuiteReport::new("lemma2");
    let config = Config::for_order(2).expect("order");
    for (name, g) in [("centered", Generator::Centered), ("sign", Generator::Sign), ("rand", Generator::Random)] {
        let f = g.build(2, 3, seed).expect("generator");
        match lemma2_construct(&f, &WalshIndex::from_u64(2, 2), 0.3, &config) {
            Ok(res) => r.expect(res.certificate.passed(), || format!("{name}: {:?}", res.certificate.failures())),
            Err(e) => r.expect(false, || format!("{name}: {e}")),
        }
    }
    r
}

/// `ψ_i(x)ψ_j(a^s x) = ψ_(j·a^s+i)(x)` and `ψ_(a^k+j) = φ_k ψ_j`, in exponents.
fn identities() -> SuiteReport {
    let mut r = SuiteReport::new("identities");
    for order in [2u32, 3] {
        let a = order as u64;
        for s in 1..=2u32 {
            let level = 2 * s;
            let big = a.pow(s);
            for c in 0..a.pow(level) {
                // the dilated point a^s x sits in cell (c mod a^s) of level s
                let dil = c % big;
                for i in 0..big {
                    for j in 0..big {
                        let lhs = cell_exponent(order, level, i, c) + cell_exponent(order, s, j, dil);
                        let rhs = cell_exponent(order, level, j * big + i, c);
                        r.expect(lhs % a == rhs % a, || format!("a={order} s={s} i={i} j={j} cell {c}"));
                    }
                }
            }
        }
        for k in 0..=2u32 {
            let level = k + 1;
            let ak = a.pow(k);
            for c in 0..a.pow(level) {
                for j in 0..ak {
                    let lhs = cell_exponent(order, level, ak, c) + cell_exponent(order, level, j, c);
                    let rhs = cell_exponent(order, level, ak + j, c);
                    r.expect(lhs % a == rhs % a, || format!("a={order} k={k} j={j} cell {c}"));
                }
            }
        }
    }
    r
}

fn certificates() -> SuiteReport {
    let mut r = SuiteReport::new("certificates");
    let config = Config::for_order(2).expect("order");
    let d = AdicInterval::from_cell(2, 1, 1).expect("interval");
    let l1 = lemma1_construct(Complex64::new(1.0, 0.0), 2, 0.4, &d, &config).expect("lemma1");
    let f = Generator::Sign.build(2, 2, 0).expect("generator");
    let l2 = lemma2_construct(&f, &WalshIndex::from_u64(2, 2), 0.3, &config).expect("lemma2");
    for cert in [&l1.certificate, &l2.certificate] {
        let text = io::to_string(&io::certificate_to_json(cert)).expect("serialize");
        let back = serde_json::from_str(&text)
            .map_err(crate::error::Error::from)
            .and_then(|v| io::certificate_from_json(&v));
        match back {
            Ok(back) => {
                let again = io::to_string(&io::certificate_to_json(&back)).expect("serialize");
                r.expect(again == text, || format!("{}: not byte-stable", cert.kind));
                let ok = verify(&back).map(|v| v.passed()).unwrap_or(false);
                r.expect(ok, || format!("{}: does not verify", cert.kind));
                let mut bad = back.clone();
                if let Some(c) = bad.conclusions.iter_mut().find(|c| c.achieved_value != 0.0) {
                    c.achieved_value *= 2.0;
                }
                let caught = verify(&bad).map(|v| !v.passed()).unwrap_or(true);
                r.expect(caught, || format!("{}: tampering not detected", cert.kind));
            }
            Err(e) => r.expect(false, || format!("{}: {e}", cert.kind)),
        }
    }
    r
}
