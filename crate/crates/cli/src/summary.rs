//! Plain-text summaries for `classify` and `verify`.

use std::fmt::Write;

use bethesep::{Classification, PtWitness, SelfAdjointWitness, SeparatedKind};

use crate::analysis::PairResidual;

fn robin(r: &bethesep::Robin) -> String {
    match r {
        bethesep::Robin::Infinite => "inf".into(),
        bethesep::Robin::Finite(z) => crate::analysis::fmt_complex(*z),
    }
}

pub fn classification(c: &Classification) -> String {
    let mut out = String::new();
    match &c.self_adjoint_witness {
        Some(SelfAdjointWitness::NonSeparated { theta, a, b, c, d }) => {
            writeln!(
                out,
                "self-adjoint: yes (theta={theta}, a={a}, b={b}, c={c}, d={d})"
            )
        }
        Some(SelfAdjointWitness::Separated {
            kind: SeparatedKind::Dirichlet,
            ..
        }) => {
            writeln!(out, "self-adjoint: yes (Dirichlet)")
        }
        Some(SelfAdjointWitness::Separated {
            kind: SeparatedKind::Neumann,
            ..
        }) => {
            writeln!(out, "self-adjoint: yes (Neumann)")
        }
        Some(SelfAdjointWitness::Separated {
            h_plus, h_minus, ..
        }) => {
            writeln!(
                out,
                "self-adjoint: yes (Robin, h+={}, h-={})",
                robin(h_plus),
                robin(h_minus)
            )
        }
        None => writeln!(out, "self-adjoint: no"),
    }
    .unwrap();
    match &c.pt_witness {
        Some(PtWitness::NonSeparated { theta, phi, b, c }) => {
            writeln!(
                out,
                "PT-symmetric: yes (theta={theta}, phi={phi}, b={b}, c={c})"
            )
        }
        Some(PtWitness::Separated { h1, theta }) => {
            writeln!(out, "PT-symmetric: yes (h1={h1}, theta={theta})")
        }
        None => writeln!(out, "PT-symmetric: no"),
    }
    .unwrap();
    out
}

pub fn residual_line(name: &str, residual: f64, tol: f64) -> String {
    let status = if residual <= tol {
        "ok"
    } else {
        "above tolerance"
    };
    format!("{name} residual: {residual:.3e} (tol {tol:.1e}) {status}\n")
}

pub fn boundary_lines(residuals: &[PairResidual], tol: f64) -> String {
    residuals
        .iter()
        .map(|p| {
            residual_line(
                &format!("boundary [{}, {}]", p.pair[0], p.pair[1]),
                p.residual,
                tol,
            )
        })
        .collect()
}
