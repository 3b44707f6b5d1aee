//! Figure data as CSV rows `x,value,method,level`.
//!
//! * `fig2`: hidden-state value for the Motzkin witness, `x = n_max` in 4..=14,
//!   `level = D̃` in {6, 8, 10}.
//! * `robinson-choi-lam`: the same for the Robinson and Choi-Lam witnesses at `D̃ = 6`.
//! * `fig3b`: PFR values for the 17-qubit state, `x = level = b'` in 1..=b_max
//!   (default 40), plus one `rays` row with `x = 0` and `level` the number of lines.
//!
//! Rows are computed in parallel and written in a fixed order. Unbounded
//! problems (too few lines) give `-inf`, solver failures `NaN`.

use anyhow::{bail, Result};
use nonclass_core::catalog::{choi_lam, motzkin, robinson, tura_state};
use nonclass_core::certify::{RaySet, VerifyTolerance};
use nonclass_core::detect::{Detector, Method, DEFAULT_SPIN_RAYS};
use nonclass_core::polyalg::RealBivarPoly;
use nonclass_core::quantum::DickeState;
use nonclass_core::sdpcore::{backend_from_env, Status};
use rayon::prelude::*;

use crate::commands::solve_opts;
use crate::config::Flags;
use crate::io::emit;
use crate::Verdict;

const FIG3B_LEVELS: usize = 40;

enum Task<'a> {
    Hidden {
        name: &'static str,
        f: &'a RealBivarPoly,
        n_max: usize,
        d_tilde: usize,
    },
    Pfr(&'a DickeState, usize),
    Rays(&'a DickeState, usize),
}

struct Row {
    x: usize,
    value: f64,
    method: &'static str,
    level: usize,
}

fn reported(status: Status, value: f64) -> f64 {
    if status == Status::Unbounded {
        f64::NEG_INFINITY
    } else {
        value
    }
}

impl Task<'_> {
    fn run(&self, det: &Detector) -> Result<Row> {
        Ok(match *self {
            Task::Hidden { name, f, n_max, d_tilde } => {
                let h = det.construct_hidden_state(f, n_max, d_tilde)?;
                Row { x: n_max, value: reported(h.status, h.value), method: name, level: d_tilde }
            }
            Task::Pfr(s, b) => {
                let r = det.detect_spin(s, Method::Pfr(b))?;
                Row { x: b, value: reported(r.status, r.value), method: "pfr", level: b }
            }
            Task::Rays(s, n) => {
                let r = det.detect_spin_lower(s, &RaySet::uniform(n)?)?;
                Row { x: 0, value: reported(r.status, r.value), method: "rays", level: n }
            }
        })
    }
}

pub fn run(figure: &str, flags: &Flags) -> Result<Verdict> {
    let jobs = match flags.jobs {
        Some(0) => bail!("--jobs must be at least 1"),
        Some(n) => n,
        None => std::thread::available_parallelism().map_or(1, |n| n.get()),
    };
    let pool = rayon::ThreadPoolBuilder::new().num_threads(jobs).build()?;
    let backend = backend_from_env()?;
    let det = Detector {
        backend: &*backend,
        opts: solve_opts(flags)?,
        tolerance: VerifyTolerance::default(),
    };

    let (fm, fr, fcl) = (motzkin(), robinson(), choi_lam());
    let tura = tura_state(1.0, 1, 8)?;
    let mut tasks = Vec::new();
    match figure {
        "fig2" => {
            for d_tilde in [6, 8, 10] {
                for n_max in 4..=14 {
                    tasks.push(Task::Hidden { name: "motzkin", f: &fm, n_max, d_tilde });
                }
            }
        }
        "robinson-choi-lam" => {
            for (name, f) in [("robinson", &fr), ("choi-lam", &fcl)] {
                for n_max in 4..=14 {
                    tasks.push(Task::Hidden { name, f, n_max, d_tilde: 6 });
                }
            }
        }
        "fig3b" => {
            for b in 1..=flags.b_max.unwrap_or(FIG3B_LEVELS) {
                tasks.push(Task::Pfr(&tura, b));
            }
            tasks.push(Task::Rays(&tura, flags.rays.unwrap_or(DEFAULT_SPIN_RAYS)));
        }
        other => bail!("unknown figure {other:?}"),
    }

    let rows: Vec<Result<Row>> = pool.install(|| tasks.par_iter().map(|t| t.run(&det)).collect());
    let mut csv = String::from("x,value,method,level\n");
    for row in rows {
        let r = row?;
        csv.push_str(&format!("{},{},{},{}\n", r.x, r.value, r.method, r.level));
    }
    emit(flags.out.as_deref(), &csv)?;
    Ok(Verdict::Yes)
}
