/// Discrete Gaussian filter.
///
/// Kernel taps cover `±ceil(4 sigma)` and are renormalised to sum to one.
/// The series is extended by half-sample reflection (`c b a | a b c | c b a`),
/// repeated as often as the kernel needs, so length and sum are preserved.
pub fn gaussian_smooth(series: &[f64], sigma: f64) -> Vec<f64> {
    let n = series.len();
    if !(sigma > 0.0) || n == 0 {
        return series.to_vec();
    }
    let radius = (4.0 * sigma).ceil() as i64;
    let mut kernel: Vec<f64> = (-radius..=radius)
        .map(|k| (-(k * k) as f64 / (2.0 * sigma * sigma)).exp())
        .collect();
    let total: f64 = kernel.iter().sum();
    kernel.iter_mut().for_each(|w| *w /= total);

    let period = 2 * n as i64;
    let reflect = |i: i64| {
        let m = i.rem_euclid(period);
        if m < n as i64 {
            m as usize
        } else {
            (period - 1 - m) as usize
        }
    };
    (0..n as i64)
        .map(|i| {
            kernel
                .iter()
                .enumerate()
                .map(|(k, w)| w * series[reflect(i + k as i64 - radius)])
                .sum()
        })
        .collect()
}
