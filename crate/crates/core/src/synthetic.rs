//! Seeded synthetic dataset whose GDP obeys the model-1 bridge equation.
//!
//! ICE is solved quarter by quarter so that GDP tracks an AR(1) target; IPI
//! and CEM are affine in time, so their jagged edge is filled exactly. The
//! remaining indicators are independent random walks. `noise` is the
//! standard deviation of the GDP disturbance.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::bridge::{mean3, yoy_growth, Regressor, GDP};
use crate::error::{Error, Result};
use crate::store::{Dataset, MonthIndex, MonthlySeries, QuarterIndex, QuarterlySeries, SeriesSchema};

pub const MODEL1_INTERCEPT: f64 = 0.736;

pub const MODEL1_COEFFICIENTS: [(Regressor, f64); 5] = [
    (Regressor::Sum, 0.497),
    (Regressor::EsiC, 0.055),
    (Regressor::Ice, 0.310),
    (Regressor::Ipi, 0.068),
    (Regressor::Cem, 0.018),
];

pub const SHIPPED_SEED: u64 = 20_190_131;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SyntheticConfig {
    pub seed: u64,
    pub start: QuarterIndex,
    pub end: QuarterIndex,
    pub noise: f64,
}

impl Default for SyntheticConfig {
    fn default() -> Self {
        SyntheticConfig {
            seed: SHIPPED_SEED,
            start: QuarterIndex::new(1995, 1).expect("valid"),
            end: QuarterIndex::new(2019, 4).expect("valid"),
            noise: 0.3,
        }
    }
}

struct Draw(ChaCha8Rng);

impl Draw {
    fn normal(&mut self, sd: f64) -> f64 {
        sd * self.0.sample::<f64, _>(StandardNormal)
    }
}

fn coefficient(r: Regressor) -> f64 {
    MODEL1_COEFFICIENTS.iter().find(|(x, _)| *x == r).map(|(_, b)| *b).expect("model-1 regressor")
}

fn yoy(means: &[f64], k: usize) -> f64 {
    yoy_growth(means[k], means[k - 4]).expect("positive synthetic levels")
}

/// Monthly values for a quarter with the given mean and a zero-sum shape.
fn spread(mean: f64, shape: f64) -> [f64; 3] {
    [mean - shape, mean, mean + shape]
}

pub fn generate(config: &SyntheticConfig) -> Result<Dataset> {
    let nq = config.end.quarters_since(config.start) + 1;
    if nq < 12 {
        return Err(Error::InvalidInput(format!("synthetic sample of {nq} quarters is too short")));
    }
    if !(config.noise >= 0.0 && config.noise.is_finite()) {
        return Err(Error::InvalidInput(format!("noise must be non-negative, got {}", config.noise)));
    }
    let nq = nq as usize;
    let nm = 3 * nq;
    let mut d = Draw(ChaCha8Rng::seed_from_u64(config.seed));

    let mut esi = Vec::with_capacity(nm);
    let mut z = 0.0;
    for _ in 0..nm {
        z = 0.9 * z + d.normal(1.5);
        esi.push(100.0 + z);
    }
    let ipi: Vec<f64> = (0..nm).map(|m| 20.0 + 0.3 * m as f64).collect();
    let cem: Vec<f64> = (0..nm).map(|m| 200.0 - 0.5 * m as f64).collect();
    let cpi: Vec<f64> = (0..nm).map(|m| 80.0 * 1.0015f64.powi(m as i32)).collect();
    let mut oil = Vec::with_capacity(nm);
    let mut cepr = Vec::with_capacity(nm);
    let (mut lo, mut c) = (30f64.ln(), 0.0);
    for _ in 0..nm {
        lo += 0.004 + d.normal(0.04);
        oil.push(lo.exp());
        c = 0.95 * c + d.normal(0.2);
        cepr.push(3.0 + c);
    }

    let qmean = |s: &[f64], k: usize| mean3([s[3 * k], s[3 * k + 1], s[3 * k + 2]]);
    let esi_q: Vec<f64> = (0..nq).map(|k| qmean(&esi, k)).collect();
    let ipi_q: Vec<f64> = (0..nq).map(|k| qmean(&ipi, k)).collect();
    let cem_q: Vec<f64> = (0..nq).map(|k| qmean(&cem, k)).collect();

    let mut gdp = Vec::with_capacity(nq);
    let mut ice = Vec::with_capacity(nm);
    let mut target = 0.4;
    for k in 0..nq {
        target = 0.4 + 0.6 * (target - 0.4) + d.normal(0.6);
        let shape = d.normal(0.3);
        if k < 4 {
            ice.extend(spread(-4.0 + d.normal(0.5), shape));
            gdp.push(target + d.normal(config.noise));
            continue;
        }
        let sum: f64 = gdp[k - 3..k].iter().sum();
        let known = MODEL1_INTERCEPT
            + coefficient(Regressor::Sum) * sum
            + coefficient(Regressor::EsiC) * (esi_q[k] - 100.0)
            + coefficient(Regressor::Ipi) * yoy(&ipi_q, k)
            + coefficient(Regressor::Cem) * yoy(&cem_q, k);
        let months = spread((target - known) / coefficient(Regressor::Ice), shape);
        ice.extend(months);
        let y = known + coefficient(Regressor::Ice) * mean3(months) + d.normal(config.noise);
        gdp.push(y);
    }

    let mut car = Vec::with_capacity(nm);
    let mut atm = Vec::with_capacity(nm);
    let (mut lc, mut la, mut gc) = (100f64.ln(), 500f64.ln(), 0.0);
    for p in &cpi {
        gc = 0.8 * gc + d.normal(0.004);
        lc += 0.002 + gc;
        la += 0.003 + d.normal(0.01);
        car.push(lc.exp());
        atm.push(la.exp() * p / 100.0);
    }

    let mut trade = |base: f64, drift: f64| {
        let (mut vol, mut def) = (Vec::with_capacity(nq), Vec::with_capacity(nq));
        let (mut v, mut p) = (base, 100.0);
        let (mut total, mut goods) = (Vec::with_capacity(nm), Vec::with_capacity(nm));
        for k in 0..nq {
            v *= 1.0 + (drift + d.normal(1.5)) / 100.0;
            let oil_g = if k == 0 { 0.0 } else { qmean(&oil, k) / qmean(&oil, k - 1) - 1.0 };
            p *= 1.0 + 0.004 + 0.1 * oil_g + d.normal(0.004);
            vol.push(v);
            def.push(p);
            let nominal = v * p / 100.0;
            for m in spread(nominal / 3.0, 0.01 * nominal * d.normal(1.0)) {
                total.push(m);
                goods.push(0.75 * m * (1.0 + d.normal(0.01)));
            }
        }
        (vol, def, total, goods)
    };
    let (exp, def_x, exgs, exg) = trade(9_000.0, 1.2);
    let (imp, def_m, imgs, img) = trade(11_000.0, 1.0);

    let schema = SeriesSchema::standard();
    let first_month: MonthIndex = config.start.first_month();
    let mut out = Dataset::default();
    for (id, values) in [
        ("ESI", esi),
        ("ICE", ice),
        ("IPI", ipi),
        ("CEM", cem),
        ("CAR", car),
        ("ATM", atm),
        ("CPI", cpi),
        ("OIL", oil),
        ("CEPR", cepr),
        ("EXGS", exgs),
        ("EXG", exg),
        ("IMGS", imgs),
        ("IMG", img),
    ] {
        let meta = schema.get(id).expect("standard schema");
        out.insert_monthly(MonthlySeries::new(id, meta.unit, meta.noise, first_month, values)?);
    }
    for (id, values) in [(GDP, gdp), ("EXP", exp), ("IMP", imp), ("DEF_exports", def_x), ("DEF_imports", def_m)] {
        out.insert_quarterly(QuarterlySeries::new(id, config.start, values)?);
    }
    Ok(out)
}
