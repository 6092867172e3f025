//! One module per subcommand. Each `execute` takes a validated config and an
//! output directory, writes its files, prints a short summary, and returns a
//! report struct so tests can assert on results without re-parsing files.

pub mod approx_wave;
pub mod compare_limit;
pub mod convergence;
pub mod riemann;
pub mod simulate;
pub mod verify_decay;

use std::path::Path;
use std::sync::Mutex;

use rarewave_core::approx_wave::ApproxWave;
use rarewave_core::{Grid1D, SolverConfig, WaveFan};

use crate::error::CliError;

/// The core runner only emits states at listed times; make sure the final
/// state is always one of them.
pub(crate) fn with_final_snapshot(mut sc: SolverConfig) -> SolverConfig {
    if sc.t_end > 0.0 && sc.snapshot_times.last() != Some(&sc.t_end) {
        sc.snapshot_times.push(sc.t_end);
    }
    sc
}

pub(crate) fn ensure_dir(dir: &Path) -> Result<(), CliError> {
    std::fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))
}

/// Worker cap for sweep commands: RAREWAVE_THREADS when set to a positive
/// integer, otherwise the machine's parallelism.
pub(crate) fn thread_cap() -> usize {
    std::env::var("RAREWAVE_THREADS")
        .ok()
        .and_then(|s| s.parse::<usize>().ok())
        .filter(|&n| n >= 1)
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()))
}

/// Order-preserving parallel map over independent member runs. Results land
/// in input order, so output is identical for any worker count.
pub(crate) fn parallel_map<T, R, F>(inputs: Vec<T>, f: F) -> Vec<R>
where
    T: Send,
    R: Send,
    F: Fn(T) -> R + Sync,
{
    let n = inputs.len();
    let workers = thread_cap().min(n);
    if workers <= 1 {
        return inputs.into_iter().map(f).collect();
    }
    // reversed so pop() hands out jobs in input order
    let queue = Mutex::new(inputs.into_iter().enumerate().rev().collect::<Vec<_>>());
    let slots: Vec<Mutex<Option<R>>> = (0..n).map(|_| Mutex::new(None)).collect();
    std::thread::scope(|scope| {
        for _ in 0..workers {
            scope.spawn(|| loop {
                let job = queue.lock().expect("job queue").pop();
                let Some((i, input)) = job else { break };
                let result = f(input);
                *slots[i].lock().expect("result slot") = Some(result);
            });
        }
    });
    slots
        .into_iter()
        .map(|s| s.into_inner().expect("result slot").expect("every job ran"))
        .collect()
}

/// Warn when the sharp fan gets within 10% of the domain boundary by t_end;
/// the fixed-ghost boundary treatment assumes it never does.
pub(crate) fn boundary_guard(fan: &WaveFan, t_end: f64, half_length: f64) {
    let reach = fan.w1_minus.abs().max(fan.w2_plus) * t_end;
    if reach > 0.9 * half_length {
        eprintln!(
            "warning: fan edge reaches |x| = {reach:.3e} by t = {t_end}, \
             within 10% of the boundary at {half_length}"
        );
    }
}

/// Warn when the smoothed initial data has not settled onto the far-field
/// constants at the domain ends the ghost cells are frozen to.
pub(crate) fn far_field_guard(wave: &ApproxWave, grid: &Grid1D) {
    if let Ok(dev) = wave.far_field_deviation(grid) {
        if dev > 1e-6 {
            eprintln!(
                "warning: initial data is {dev:.3e} away from the far-field constants \
                 at the boundary; enlarge the domain or the deviation feeds the fixed ghosts"
            );
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parallel_map_preserves_input_order() {
        let inputs: Vec<u64> = (0..37).collect();
        let doubled = parallel_map(inputs, |x| 2 * x);
        assert_eq!(doubled, (0..37).map(|x| 2 * x).collect::<Vec<_>>());
    }

    #[test]
    fn parallel_map_handles_empty_input() {
        let out: Vec<u64> = parallel_map(Vec::<u64>::new(), |x| x);
        assert!(out.is_empty());
    }
}
