#![allow(dead_code)]

pub mod spectrum {
    use rustfft::{num_complex::Complex, FftPlanner};

    /// Hann-windowed magnitude spectrum, zero-padded to at least `min_len` bins.
    pub fn magnitude(samples: &[f32], min_len: usize) -> Vec<f64> {
        let n = samples.len();
        let len = min_len.max(n).next_power_of_two();
        let mut buf: Vec<Complex<f64>> = samples
            .iter()
            .enumerate()
            .map(|(i, &s)| {
                let w = 0.5 - 0.5 * (std::f64::consts::TAU * i as f64 / (n.max(2) - 1) as f64).cos();
                Complex::new(s as f64 * w, 0.0)
            })
            .collect();
        buf.resize(len, Complex::new(0.0, 0.0));
        FftPlanner::new().plan_fft_forward(len).process(&mut buf);
        buf[..len / 2].iter().map(|c| c.norm()).collect()
    }

    /// Strongest spectral peak in `[lo, hi]` Hz, refined by parabolic interpolation.
    pub fn peak_hz(samples: &[f32], sr: u32, lo: f64, hi: f64) -> f64 {
        let mag = magnitude(samples, 1 << 18);
        let bin = sr as f64 / (2 * mag.len()) as f64;
        let a = ((lo / bin).floor() as usize).max(1);
        let b = ((hi / bin).ceil() as usize).min(mag.len() - 2);
        let k = (a..=b).max_by(|&i, &j| mag[i].total_cmp(&mag[j])).unwrap();
        let (l, c, r) = (mag[k - 1].ln(), mag[k].ln(), mag[k + 1].ln());
        let denom = l - 2.0 * c + r;
        let delta = if denom.abs() > 1e-300 { 0.5 * (l - r) / denom } else { 0.0 };
        (k as f64 + delta) * bin
    }

    /// Local maxima in `[lo, hi]` Hz whose magnitude is at least `rel` of the band maximum.
    pub fn peaks(samples: &[f32], sr: u32, lo: f64, hi: f64, rel: f64) -> Vec<f64> {
        let mag = magnitude(samples, 1 << 18);
        let bin = sr as f64 / (2 * mag.len()) as f64;
        let a = ((lo / bin).floor() as usize).max(1);
        let b = ((hi / bin).ceil() as usize).min(mag.len() - 2);
        let top = (a..=b).map(|i| mag[i]).fold(0.0, f64::max);
        (a..=b)
            .filter(|&i| mag[i] >= rel * top && mag[i] > mag[i - 1] && mag[i] >= mag[i + 1])
            .map(|i| i as f64 * bin)
            .collect()
    }

    /// Energy in `[lo, hi]` Hz.
    pub fn band_energy(samples: &[f32], sr: u32, lo: f64, hi: f64) -> f64 {
        let mag = magnitude(samples, 0);
        let bin = sr as f64 / (2 * mag.len()) as f64;
        mag.iter()
            .enumerate()
            .filter(|(i, _)| {
                let f = *i as f64 * bin;
                f >= lo && f <= hi
            })
            .map(|(_, m)| m * m)
            .sum()
    }

    pub fn centroid(samples: &[f32], sr: u32) -> f64 {
        let mag = magnitude(samples, 0);
        let bin = sr as f64 / (2 * mag.len()) as f64;
        let (num, den) = mag
            .iter()
            .enumerate()
            .fold((0.0, 0.0), |(n, d), (i, m)| (n + i as f64 * bin * m * m, d + m * m));
        num / den
    }

    /// Onset times from positive spectral flux between `lo` and `hi` Hz.
    ///
    /// Each frame is compared with the per-bin maximum of the preceding
    /// ~30 ms, so slow beating in a sustained tone produces no flux while a
    /// note attack does.
    pub fn flux_onsets(samples: &[f32], sr: u32, lo: f64, hi: f64, min_gap_s: f64) -> Vec<f64> {
        let win = 1024;
        let hop = 128;
        let lag = 10;
        let bin = sr as f64 / win as f64;
        let (a, b) = ((lo / bin) as usize, (hi / bin) as usize);
        let mut history: Vec<Vec<f64>> = Vec::new();
        let mut flux = Vec::new();
        let mut start = 0;
        while start + win <= samples.len() {
            let mag = magnitude(&samples[start..start + win], win);
            let band: Vec<f64> = mag[a..=b].to_vec();
            let recent = &history[history.len().saturating_sub(lag)..];
            let f = if recent.is_empty() {
                0.0
            } else {
                band.iter()
                    .enumerate()
                    .map(|(k, x)| (x - recent.iter().map(|h| h[k]).fold(0.0, f64::max)).max(0.0))
                    .sum()
            };
            flux.push(((start + win) as f64 / sr as f64, f));
            history.push(band);
            start += hop;
        }
        let top = flux.iter().map(|x| x.1).fold(0.0, f64::max);
        let mut onsets: Vec<f64> = Vec::new();
        for i in 1..flux.len().saturating_sub(1) {
            let (t, f) = flux[i];
            if f > 0.3 * top && f >= flux[i - 1].1 && f > flux[i + 1].1 {
                if onsets.last().map_or(true, |&last| t - last >= min_gap_s) {
                    onsets.push(t);
                }
            }
        }
        // The flux peak lands when the attack reaches the end of the window.
        onsets.iter().map(|t| t - win as f64 / sr as f64 / 2.0).collect()
    }

    /// RMS envelope over `win_s` windows, one value per sample.
    pub fn rms_envelope(samples: &[f32], sr: u32, win_s: f64) -> Vec<f64> {
        let w = ((win_s * sr as f64) as usize).max(1);
        let mut out = Vec::with_capacity(samples.len());
        let mut acc = 0.0;
        for i in 0..samples.len() {
            acc += (samples[i] as f64).powi(2);
            if i >= w {
                acc -= (samples[i - w] as f64).powi(2);
            }
            out.push((acc.max(0.0) / w.min(i + 1) as f64).sqrt());
        }
        out
    }

    /// Intervals during which the envelope stays above `rel` of its maximum,
    /// as `(start_s, length_s)`.
    pub fn bursts(samples: &[f32], sr: u32, rel: f64) -> Vec<(f64, f64)> {
        let env = rms_envelope(samples, sr, 0.002);
        let top = env.iter().copied().fold(0.0, f64::max);
        let thr = rel * top;
        let mut out = Vec::new();
        let mut start = None;
        for (i, &e) in env.iter().enumerate() {
            match (start, e > thr) {
                (None, true) => start = Some(i),
                (Some(s), false) => {
                    out.push((s as f64 / sr as f64, (i - s) as f64 / sr as f64));
                    start = None;
                }
                _ => {}
            }
        }
        out
    }

    /// Longest run of near-silent samples, in seconds.
    pub fn longest_gap(samples: &[f32], sr: u32, floor: f32) -> f64 {
        let mut best = 0usize;
        let mut run = 0usize;
        for &s in samples {
            if s.abs() <= floor {
                run += 1;
                best = best.max(run);
            } else {
                run = 0;
            }
        }
        best as f64 / sr as f64
    }

    pub fn rms(samples: &[f32]) -> f64 {
        (samples.iter().map(|&s| (s as f64).powi(2)).sum::<f64>() / samples.len().max(1) as f64).sqrt()
    }
}

/// Independent reference implementations used to check the library.
pub mod oracle {
    use sonoscape::records::Action;

    fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, n: usize) -> f64 {
        let n = n + n % 2;
        let h = (b - a) / n as f64;
        let mut s = f(a) + f(b);
        for i in 1..n {
            s += f(a + i as f64 * h) * if i % 2 == 1 { 4.0 } else { 2.0 };
        }
        s * h / 3.0
    }

    /// Normal CDF by integrating the density. Lower tails use the upper-tail
    /// integral to [x, x + 12] so small probabilities keep relative precision.
    pub fn normal_cdf(x: f64) -> f64 {
        let pdf = |u: f64| (-u * u / 2.0).exp() / (2.0 * std::f64::consts::PI).sqrt();
        if x <= 0.0 {
            simpson(pdf, -x, -x + 12.0, 20_000)
        } else {
            1.0 - normal_cdf(-x)
        }
    }

    /// Inverse normal CDF by bisection on [`normal_cdf`].
    pub fn probit(p: f64) -> f64 {
        let (mut lo, mut hi) = (-12.0, 12.0);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if normal_cdf(mid) < p {
                lo = mid;
            } else {
                hi = mid;
            }
            if hi - lo < 1e-13 {
                break;
            }
        }
        0.5 * (lo + hi)
    }

    #[derive(Debug, Clone, Copy, PartialEq)]
    pub enum Verdict {
        Hit(f64),
        Miss,
        FalseAlarm,
        CorrectRejection,
    }

    /// Scores a checkbox history by scanning backwards from the end.
    pub fn classify(onset: Option<f64>, toggles: &[(f64, Action)]) -> Verdict {
        let predicted = onset.is_some_and(|o| toggles.iter().any(|&(t, a)| a == Action::Check && t < o));
        // The final checked stretch starts at the first check after the last uncheck.
        let last_uncheck = toggles.iter().rposition(|&(_, a)| a == Action::Uncheck);
        let after = last_uncheck.map_or(0, |i| i + 1);
        let stretch_start = toggles[after..].iter().find(|&&(_, a)| a == Action::Check).map(|&(t, _)| t);
        match onset {
            Some(_) if predicted => Verdict::FalseAlarm,
            Some(o) => stretch_start.map_or(Verdict::Miss, |t| Verdict::Hit(t - o)),
            None if stretch_start.is_some() => Verdict::FalseAlarm,
            None => Verdict::CorrectRejection,
        }
    }

    /// One-way ANOVA F from explicit sums of squares.
    pub fn anova_f(groups: &[Vec<f64>]) -> f64 {
        let all: Vec<f64> = groups.iter().flatten().copied().collect();
        let n = all.len() as f64;
        let k = groups.len() as f64;
        let grand = all.iter().sum::<f64>() / n;
        let mut ssb = 0.0;
        let mut ssw = 0.0;
        for g in groups {
            let m = g.iter().sum::<f64>() / g.len() as f64;
            ssb += g.len() as f64 * (m - grand) * (m - grand);
            for x in g {
                ssw += (x - m) * (x - m);
            }
        }
        (ssb / (k - 1.0)) / (ssw / (n - k))
    }

    /// Pooled-variance two-sample t statistic.
    pub fn student_t(a: &[f64], b: &[f64]) -> f64 {
        let m = |v: &[f64]| v.iter().sum::<f64>() / v.len() as f64;
        let ss = |v: &[f64]| {
            let mv = m(v);
            v.iter().map(|x| (x - mv).powi(2)).sum::<f64>()
        };
        let (na, nb) = (a.len() as f64, b.len() as f64);
        let pooled = (ss(a) + ss(b)) / (na + nb - 2.0);
        (m(a) - m(b)) / (pooled * (1.0 / na + 1.0 / nb)).sqrt()
    }

    /// Two-sided tail probability of Student's t, which is the p-value of
    /// F = t² on (1, df). Integrates the unnormalised density over u = tan θ.
    pub fn t_two_sided_p(t: f64, df: f64) -> f64 {
        let g = |theta: f64| {
            let u = theta.tan();
            (1.0 + u * u / df).powf(-(df + 1.0) / 2.0) / theta.cos().powi(2)
        };
        let half = std::f64::consts::FRAC_PI_2 - 1e-9;
        let body = simpson(g, 0.0, t.abs().atan(), 200_000);
        let total = simpson(g, 0.0, half, 200_000);
        1.0 - body / total
    }
}
