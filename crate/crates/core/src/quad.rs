//! Adaptive Gauss–Kronrod (G10/K21) integration of vector-valued integrands.

use std::collections::BinaryHeap;

use crate::error::{Error, Result};

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

const WGK: [f64; 11] = [
    0.011_694_638_867_371_874_278_064_396_062_192,
    0.032_558_162_307_964_727_478_818_972_459_390,
    0.054_755_896_574_351_996_031_381_300_244_580,
    0.075_039_674_810_919_952_767_043_140_916_190,
    0.093_125_454_583_697_605_535_065_465_083_366,
    0.109_387_158_802_297_641_899_210_590_325_805,
    0.123_491_976_262_065_851_077_208_980_393_820,
    0.134_709_217_311_473_325_928_054_001_771_707,
    0.142_775_938_577_060_080_797_094_273_138_717,
    0.147_739_104_901_338_491_374_841_515_972_068,
    0.149_445_554_002_916_905_664_936_468_389_821,
];

// Gauss weights for XGK[1], XGK[3], .., XGK[9].
const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893_332,
    0.149_451_349_150_580_593_145_776_339_657_697,
    0.219_086_362_515_982_043_995_534_934_228_163,
    0.269_266_719_309_996_355_091_226_921_569_469,
    0.295_524_224_714_752_870_173_892_994_651_338,
];

#[derive(Debug, Clone, Copy)]
pub struct QuadOptions {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_intervals: usize,
}

impl Default for QuadOptions {
    fn default() -> Self {
        Self {
            abs_tol: 1e-13,
            rel_tol: 1e-11,
            max_intervals: 4000,
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct QuadResult<const N: usize> {
    pub value: [f64; N],
    pub error: f64,
    pub evaluations: usize,
}

#[derive(Debug, Clone, Copy)]
struct Segment<const N: usize> {
    a: f64,
    b: f64,
    value: [f64; N],
    error: f64,
}

impl<const N: usize> PartialEq for Segment<N> {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl<const N: usize> Eq for Segment<N> {}
impl<const N: usize> PartialOrd for Segment<N> {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}
impl<const N: usize> Ord for Segment<N> {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn kronrod21<const N: usize, F>(f: &F, a: f64, b: f64) -> Segment<N>
where
    F: Fn(f64) -> [f64; N],
{
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut kron = [0.0; N];
    let mut gauss = [0.0; N];
    for c in 0..N {
        kron[c] = WGK[10] * fc[c];
    }
    for j in 0..10 {
        let dx = half * XGK[j];
        let f1 = f(center - dx);
        let f2 = f(center + dx);
        for c in 0..N {
            let s = f1[c] + f2[c];
            kron[c] += WGK[j] * s;
            if j % 2 == 1 {
                gauss[c] += WG[j / 2] * s;
            }
        }
    }
    let mut value = [0.0; N];
    let mut error: f64 = 0.0;
    for c in 0..N {
        value[c] = kron[c] * half;
        error = error.max(((kron[c] - gauss[c]) * half).abs());
    }
    Segment { a, b, value, error }
}

/// Integrate `f` over `[points[0], points[last]]`, using the interior points
/// as initial breakpoints. The error is the largest component error.
pub fn integrate<const N: usize, F>(f: F, points: &[f64], opts: &QuadOptions) -> Result<QuadResult<N>>
where
    F: Fn(f64) -> [f64; N],
{
    if points.len() < 2 {
        return Err(Error::InvalidArgument("integration needs at least two points".into()));
    }
    let mut heap = BinaryHeap::new();
    let mut evaluations = 0;
    for w in points.windows(2) {
        if w[1] > w[0] {
            heap.push(kronrod21(&f, w[0], w[1]));
            evaluations += 21;
        }
    }
    loop {
        let mut total = [0.0; N];
        let mut err = 0.0;
        for s in heap.iter() {
            for c in 0..N {
                total[c] += s.value[c];
            }
            err += s.error;
        }
        let scale = total.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
        let tol = opts.abs_tol.max(opts.rel_tol * scale);
        if err <= tol {
            return Ok(QuadResult { value: total, error: err, evaluations });
        }
        if heap.len() >= opts.max_intervals {
            return Err(Error::IntegrationFailure { estimate: scale, error: err });
        }
        let worst = match heap.pop() {
            Some(s) => s,
            None => return Ok(QuadResult { value: total, error: err, evaluations }),
        };
        let mid = 0.5 * (worst.a + worst.b);
        if !(mid > worst.a && mid < worst.b) {
            // Interval can no longer be split in floating point.
            return Err(Error::IntegrationFailure { estimate: scale, error: err });
        }
        heap.push(kronrod21(&f, worst.a, mid));
        heap.push(kronrod21(&f, mid, worst.b));
        evaluations += 42;
    }
}

/// Integrate `f` over `[points[0], ∞)`; the last finite point must be positive.
/// The tail beyond it is mapped onto `(0, 1]` by `x = b / ω`.
pub fn integrate_to_infinity<const N: usize, F>(f: F, points: &[f64], opts: &QuadOptions) -> Result<QuadResult<N>>
where
    F: Fn(f64) -> [f64; N],
{
    let b = *points
        .last()
        .ok_or_else(|| Error::InvalidArgument("integration needs at least one point".into()))?;
    if b <= 0.0 {
        return Err(Error::InvalidArgument("tail start must be positive".into()));
    }
    let tail = |x: f64| {
        let w = b / x;
        let v = f(w);
        let jac = b / (x * x);
        let mut out = [0.0; N];
        for c in 0..N {
            out[c] = v[c] * jac;
        }
        out
    };
    // The finite part and the tail share one error budget: u in [b, b + 1]
    // maps to x = 1 - (u - b), so the singular end x = 0 sits at u = b + 1.
    let combined = |u: f64| -> [f64; N] {
        if u < b {
            f(u)
        } else {
            tail(1.0 - (u - b))
        }
    };
    let mut pts = points.to_vec();
    pts.push(b + 1.0);
    integrate(combined, &pts, opts)
}
