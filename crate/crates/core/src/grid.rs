//! Evenly spaced sample points.

/// `steps` points from `start` to `stop` inclusive. A single step yields `start`.
pub fn linspace(start: f64, stop: f64, steps: usize) -> Vec<f64> {
    match steps {
        0 => Vec::new(),
        1 => vec![start],
        _ => {
            let step = (stop - start) / (steps - 1) as f64;
            (0..steps)
                .map(|i| {
                    if i == steps - 1 {
                        stop
                    } else {
                        start + step * i as f64
                    }
                })
                .collect()
        }
    }
}

/// `steps` points from `start` to `stop` inclusive, equally spaced in log scale.
/// Both endpoints must be positive.
pub fn logspace(start: f64, stop: f64, steps: usize) -> Vec<f64> {
    debug_assert!(start > 0.0 && stop > 0.0);
    let (a, b) = (start.ln(), stop.ln());
    let mut pts: Vec<f64> = linspace(a, b, steps).into_iter().map(f64::exp).collect();
    if let Some(last) = pts.last_mut() {
        if steps > 1 {
            *last = stop;
        }
    }
    if let Some(first) = pts.first_mut() {
        *first = start;
    }
    pts
}
