//! Globally adaptive 21-point Gauss-Kronrod quadrature on an interval with
//! caller-supplied breakpoints.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::{Error, Result};

#[allow(clippy::excessive_precision)]
const XGK: [f64; 11] = [
    0.995_657_163_025_808_080_735_527_280_689_003,
    0.973_906_528_517_171_720_077_964_012_084_452,
    0.930_157_491_355_708_226_001_207_180_059_508,
    0.865_063_366_688_984_510_732_096_688_423_493,
    0.780_817_726_586_416_897_063_717_578_345_042,
    0.679_409_568_299_024_406_234_327_365_114_874,
    0.562_757_134_668_604_683_339_000_099_272_694,
    0.433_395_394_129_247_190_799_265_943_165_784,
    0.294_392_862_701_460_198_131_126_603_103_866,
    0.148_874_338_981_631_210_884_826_001_129_720,
    0.0,
];

#[allow(clippy::excessive_precision)]
const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893_332,
    0.149_451_349_150_580_593_145_776_339_657_697,
    0.219_086_362_515_982_043_995_534_934_228_163,
    0.269_266_719_309_996_355_091_226_921_569_469,
    0.295_524_224_714_752_870_173_892_994_651_338,
];

#[allow(clippy::excessive_precision)]
const WGK: [f64; 11] = [
    0.011_694_638_867_371_874_278_064_396_062_192,
    0.032_558_162_307_964_727_478_818_972_459_390,
    0.054_755_896_574_351_996_031_381_300_244_580,
    0.075_039_674_810_919_952_767_043_140_916_190,
    0.093_125_454_583_697_605_535_065_465_083_366,
    0.109_387_158_802_297_641_899_210_590_325_805,
    0.123_491_976_262_065_851_077_958_109_831_074,
    0.134_709_217_311_473_325_928_054_001_771_707,
    0.142_775_938_577_060_080_797_094_273_138_717,
    0.147_739_104_901_338_491_374_841_515_972_068,
    0.149_445_554_002_916_905_664_936_468_389_821,
];

/// Default cap on the number of panels.
pub const MAX_PANELS: usize = 20_000;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Quadrature {
    pub value: f64,
    pub err: f64,
    pub panels: usize,
}

#[derive(Debug, Clone, Copy)]
struct Panel {
    lo: f64,
    hi: f64,
    value: f64,
    err: f64,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.err == other.err
    }
}

impl Eq for Panel {}

impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Panel {
    fn cmp(&self, other: &Self) -> Ordering {
        self.err.total_cmp(&other.err)
    }
}

fn kronrod21(f: &impl Fn(f64) -> f64, lo: f64, hi: f64) -> Panel {
    let center = 0.5 * (lo + hi);
    let half = 0.5 * (hi - lo);
    let fc = f(center);
    let mut kronrod = WGK[10] * fc;
    let mut gauss = 0.0;
    let mut abs = kronrod.abs();
    let mut samples = [(0.0, 0.0); 10];
    for (j, sample) in samples.iter_mut().enumerate() {
        let dx = half * XGK[j];
        let (f1, f2) = (f(center - dx), f(center + dx));
        *sample = (f1, f2);
        kronrod += WGK[j] * (f1 + f2);
        abs += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            gauss += WG[j / 2] * (f1 + f2);
        }
    }
    let mean = 0.5 * kronrod;
    let mut asc = WGK[10] * (fc - mean).abs();
    for (j, (f1, f2)) in samples.iter().enumerate() {
        asc += WGK[j] * ((f1 - mean).abs() + (f2 - mean).abs());
    }
    let value = kronrod * half;
    let (abs, asc) = (abs * half.abs(), asc * half.abs());
    let mut err = ((kronrod - gauss) * half).abs();
    if asc != 0.0 && err != 0.0 {
        err = asc * (200.0 * err / asc).powf(1.5).min(1.0);
    }
    if abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        err = err.max(50.0 * f64::EPSILON * abs);
    }
    if !value.is_finite() {
        err = f64::INFINITY;
    }
    Panel { lo, hi, value, err }
}

/// Integrates `f` over `[lo, hi]` to absolute accuracy `tol`. Breakpoints
/// inside the interval seed the initial panels.
pub fn integrate(f: impl Fn(f64) -> f64, lo: f64, hi: f64, breakpoints: &[f64], tol: f64) -> Result<Quadrature> {
    integrate_with_limit(f, lo, hi, breakpoints, tol, MAX_PANELS)
}

pub fn integrate_with_limit(
    f: impl Fn(f64) -> f64,
    lo: f64,
    hi: f64,
    breakpoints: &[f64],
    tol: f64,
    max_panels: usize,
) -> Result<Quadrature> {
    let mut cuts: Vec<f64> = breakpoints.iter().copied().filter(|t| *t > lo && *t < hi).collect();
    cuts.push(lo);
    cuts.push(hi);
    cuts.sort_by(f64::total_cmp);
    cuts.dedup_by(|a, b| (*a - *b).abs() <= 1e-15 * (hi - lo));

    let mut heap: BinaryHeap<Panel> = cuts.windows(2).map(|w| kronrod21(&f, w[0], w[1])).collect();
    let min_width = 1e-13 * (hi - lo);
    let mut frozen: Vec<Panel> = Vec::new();
    let exact_total =
        |heap: &BinaryHeap<Panel>, frozen: &[Panel]| heap.iter().chain(frozen).map(|p| p.err).sum::<f64>();
    let mut total = exact_total(&heap, &frozen);
    loop {
        if total <= tol {
            // Running sums drift; confirm before accepting.
            total = exact_total(&heap, &frozen);
            if total <= tol {
                break;
            }
        }
        if heap.len() + frozen.len() >= max_panels {
            return Err(Error::Quad { estimate: exact_total(&heap, &frozen), tol });
        }
        let Some(worst) = heap.pop() else {
            return Err(Error::Quad { estimate: total, tol });
        };
        if worst.hi - worst.lo < min_width {
            frozen.push(worst);
            continue;
        }
        let mid = 0.5 * (worst.lo + worst.hi);
        let (left, right) = (kronrod21(&f, worst.lo, mid), kronrod21(&f, mid, worst.hi));
        total += left.err + right.err - worst.err;
        if !total.is_finite() {
            total = exact_total(&heap, &frozen) + left.err + right.err;
        }
        heap.push(left);
        heap.push(right);
    }
    let mut panels: Vec<Panel> = heap.into_vec();
    panels.extend(frozen);
    panels.sort_by(|a, b| a.lo.total_cmp(&b.lo));
    Ok(Quadrature {
        value: panels.iter().map(|p| p.value).sum(),
        err: panels.iter().map(|p| p.err).sum(),
        panels: panels.len(),
    })
}
