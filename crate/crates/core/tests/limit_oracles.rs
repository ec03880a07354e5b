use proptest::prelude::*;
use rand::Rng;
use sigasym::curves::CurvatureProfile;
use sigasym::limit::{
    bridge_exponential_mc, closed_form_bridge_exponential, r_nd_mc, r_nd_ode, sample_bridge, solve_psi_continuous,
    solve_psi_discrete, DiscreteMeasure,
};
use sigasym::rng::{replicate, stream, McConfig};

/// Double-double arithmetic, just enough for the forward recursion.
#[derive(Clone, Copy)]
struct Dd(f64, f64);

impl Dd {
    fn from(x: f64) -> Self {
        Dd(x, 0.0)
    }
    fn add(self, o: Dd) -> Dd {
        let s = self.0 + o.0;
        let bb = s - self.0;
        let e = (self.0 - (s - bb)) + (o.0 - bb);
        let lo = e + self.1 + o.1;
        let hi = s + lo;
        Dd(hi, lo - (hi - s))
    }
    fn mul(self, o: Dd) -> Dd {
        let p = self.0 * o.0;
        let e = self.0.mul_add(o.0, -p);
        let lo = e + self.0 * o.1 + self.1 * o.0;
        let hi = p + lo;
        Dd(hi, lo - (hi - p))
    }
    fn neg(self) -> Dd {
        Dd(-self.0, -self.1)
    }
}

type Density = (&'static str, fn(f64) -> f64);

fn psi1_double_double(atoms: &[f64], weights: &[f64], scale: f64) -> f64 {
    let (mut a, mut b) = (Dd::from(0.0), Dd::from(1.0));
    let scale = Dd::from(scale);
    for (&t, &w) in atoms.iter().zip(weights) {
        let t = Dd::from(t);
        let value = a.add(b.mul(t));
        b = b.add(scale.mul(Dd::from(w)).mul(value));
        a = value.add(b.mul(t).neg());
    }
    a.add(b).0
}

#[test]
fn forward_recursion_is_exact_to_working_precision() {
    let mut rng = stream(17, 0);
    for _ in 0..20 {
        let n = 100;
        let mut atoms: Vec<f64> = (0..n).map(|_| rng.random::<f64>()).collect();
        atoms.sort_by(f64::total_cmp);
        atoms.dedup();
        let weights: Vec<f64> = atoms.iter().map(|_| 5.0 * rng.random::<f64>()).collect();
        let mu = DiscreteMeasure::new(atoms.clone(), weights.clone(), 0.1).unwrap();
        let fast = solve_psi_discrete(&mu).psi1();
        let precise = psi1_double_double(&atoms, &weights, 0.1);
        assert!((fast / precise - 1.0).abs() < 1e-14, "{fast} vs {precise}");
    }
}

fn discrete_psi1(density: impl Fn(f64) -> f64, n: usize) -> f64 {
    let weights = (1..=n).map(|j| density(j as f64 / n as f64)).collect();
    solve_psi_discrete(&DiscreteMeasure::uniform_grid(weights, 1.0 / n as f64).unwrap()).psi1()
}

#[test]
fn discrete_converges_to_continuous() {
    let densities: [Density; 2] = [
        ("constant", |_| 8.0 * std::f64::consts::PI.powi(2)),
        ("linear", |t| 1.0 + 3.0 * t),
    ];
    for (name, rho) in densities {
        let exact = solve_psi_continuous(rho, 1e-14).unwrap().psi1();
        let ns = [100usize, 1000, 10_000];
        let errs: Vec<f64> = ns
            .iter()
            .map(|&n| (discrete_psi1(rho, n) / exact - 1.0).abs())
            .collect();
        let slope = (errs[2].ln() - errs[0].ln()) / ((ns[2] as f64).ln() - (ns[0] as f64).ln());
        println!("{name}: errors {errs:?}, log-log slope {slope:.3}");
        assert!(errs[2] < 1e-3);
        assert!(slope <= -0.8, "{name}: slope {slope}");
    }
}

#[test]
fn constant_weights_reach_sinh_limit() {
    let lambda: f64 = 2.5;
    let psi = discrete_psi1(|_| lambda * lambda, 10_000);
    assert!((psi / (lambda.sinh() / lambda) - 1.0).abs() < 1e-3);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn psi1_increases_with_each_weight(
        weights in prop::collection::vec(0.0f64..10.0, 1..30),
        pick in any::<prop::sample::Index>(),
        bump in 1e-3f64..1.0,
    ) {
        let base = solve_psi_discrete(&DiscreteMeasure::uniform_grid(weights.clone(), 0.3).unwrap()).psi1();
        let mut bumped = weights.clone();
        let i = pick.index(weights.len());
        bumped[i] += bump;
        let more = solve_psi_discrete(&DiscreteMeasure::uniform_grid(bumped, 0.3).unwrap()).psi1();
        // The last atom sits at t = 1, where the slope change cannot move ψ(1).
        if i + 1 < weights.len() {
            prop_assert!(more > base);
        } else {
            prop_assert!((more - base).abs() <= 1e-14 * base);
        }
    }

    #[test]
    fn psi_is_positive_and_continuous(weights in prop::collection::vec(0.0f64..20.0, 1..40)) {
        let sol = solve_psi_discrete(&DiscreteMeasure::uniform_grid(weights, 0.5).unwrap());
        let (knots, a, b) = sol.segments().unwrap();
        for j in 1..knots.len() {
            let t = knots[j];
            prop_assert!((a[j - 1] + b[j - 1] * t - (a[j] + b[j] * t)).abs() <= 1e-12 * (a[j] + b[j] * t).abs().max(1.0));
            prop_assert!(a[j] + b[j] * t > 0.0);
        }
    }
}

#[test]
fn bridge_moments() {
    let config = McConfig::new(100_000, 4);
    let var_mid = replicate(&config, |rng| {
        let b = sample_bridge(100, rng);
        b.values()[50].powi(2)
    });
    assert!(var_mid.z_score(0.25) < 3.0, "{var_mid:?}");
    let cov = replicate(&config, |rng| {
        let b = sample_bridge(100, rng);
        b.values()[25] * b.values()[75]
    });
    assert!(cov.z_score(0.25 * 0.25) < 3.0, "{cov:?}");
}

#[test]
fn closed_form_matches_bridge_mc_at_half() {
    let mc = bridge_exponential_mc(0.5, 1000, &McConfig::new(100_000, 9));
    let exact = closed_form_bridge_exponential(0.5).unwrap();
    assert!((exact - 0.9224).abs() < 1e-4);
    assert!(mc.z_score(exact) < 3.0, "{mc:?} vs {exact}");
}

#[test]
fn r_nd_routes_agree_on_random_profiles() {
    let mut rng = stream(23, 0);
    for k in 0..5 {
        let n = 50;
        let values: Vec<f64> = (0..=n).map(|_| 20.0 * rng.random::<f64>()).collect();
        let profile = CurvatureProfile::from_values(values, 0.0).unwrap();
        let d = 0.25 + rng.random::<f64>();
        let ode = r_nd_ode(&profile, d).unwrap();
        let mc = r_nd_mc(&profile, d, &McConfig::new(100_000, 100 + k));
        assert!(mc.z_score(ode) < 3.0, "profile {k}: {mc:?} vs {ode}");
    }
}

#[test]
fn r_nd_ode_reaches_closed_form() {
    let (kappa2, d) = (4.0 * std::f64::consts::PI.powi(2), 0.5);
    let exact = closed_form_bridge_exponential(2.0 * d * kappa2).unwrap();
    let ode = r_nd_ode(&CurvatureProfile::constant(kappa2, 1000).unwrap(), d).unwrap();
    assert!((ode / exact - 1.0).abs() < 1e-3, "{ode} vs {exact}");
}
