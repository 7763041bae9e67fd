//! End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
//! exits non-zero if any criterion fails.

use std::f64::consts::{PI, SQRT_2, TAU};
use std::process::ExitCode;
use std::time::Instant;

use qreset::dynamics::{
    evolve_lindblad, max_rate_condition, purcell_rate, DensityMatrix, EvolveOptions, LindbladModel,
    PulseSchedule, SystemParams,
};
use qreset::modes::{
    calibrate_phase_velocity, find_modes, linewidth_lorentzian, linewidth_roundtrip,
    purcell_suppression, required_attenuation, Cavity,
};
use qreset::readout::{
    assignment_matrix, effective_temperature, sample_shots, ReadoutModel, BOLTZMANN, HBAR,
};
use qreset::reset::{
    analyze_damped, benchmark_eg_reset, concatenated_reset, fringe_linecut, resonant_decay,
    run_schedule, InitialState, Preparation, BENCHMARK_PLATEAU,
};
use qreset::rf::{
    diplexer_isolation, find_cutoff, fit_elements, DiplexerSpec, FitTarget, FrequencyGrid,
    LadderTopology, LadderValues, LineParams, DESIGN_C1, DESIGN_C2, DESIGN_L1, DESIGN_L2,
    HIGHPASS_CUTOFF_HZ, LOWPASS_CUTOFF_HZ,
};

type Check = Result<Vec<String>, String>;

struct Outcome {
    id: u32,
    name: &'static str,
    pass: bool,
    notes: Vec<String>,
    secs: f64,
}

fn ensure(cond: bool, notes: &mut Vec<String>, msg: String) -> bool {
    notes.push(format!("{} {msg}", if cond { "ok  " } else { "MISS" }));
    cond
}

fn finish(pass: bool, notes: Vec<String>) -> Check {
    if pass {
        Ok(notes)
    } else {
        Err(notes.join("\n      "))
    }
}

fn mhz(w: f64) -> f64 {
    w / TAU / 1e6
}

fn criterion_1() -> Check {
    let (k, g) = (TAU * 15e6, TAU * 10e6);
    let mut notes = Vec::new();
    let inv_ns = 1e9 / purcell_rate(k, g, 0.0);
    // resonant oracle: both eigenvalues share the real part κ/4 when g > κ/4
    let oracle_ns = 1e9 * 2.0 / k;
    let mut pass = ensure(
        (inv_ns / 21.2 - 1.0).abs() <= 1e-3,
        &mut notes,
        format!(
            "1/Γ = {inv_ns:.4} ns vs 21.2 ns (rel {:.2e})",
            inv_ns / 21.2 - 1.0
        ),
    );
    pass &= ensure(
        (inv_ns / oracle_ns - 1.0).abs() <= 1e-12,
        &mut notes,
        format!("oracle 2/κ = {oracle_ns:.6} ns"),
    );
    let mut worst: f64 = 0.0;
    for i in 0..=400 {
        let gi = k / 4.0 * (1.0 + i as f64 * 0.05);
        worst = worst.max((purcell_rate(k, gi, 0.0) / (k / 2.0) - 1.0).abs());
    }
    pass &= ensure(
        worst <= 1e-12,
        &mut notes,
        format!("max |Γ/(κ/2) − 1| over g ∈ [κ/4, 5.25κ] = {worst:.1e}"),
    );
    pass &= ensure(
        max_rate_condition(k, k / 4.0).saturated && !max_rate_condition(k, 0.249 * k).saturated,
        &mut notes,
        "saturation flag switches at g = κ/4".into(),
    );
    finish(pass, notes)
}

fn criterion_2() -> Check {
    let base = SystemParams {
        t_bath: 0.0,
        t1_int: None,
        ..Default::default()
    };
    let opts = EvolveOptions {
        check_positivity: false,
        ..Default::default()
    };
    let mut notes = Vec::new();
    let mut pass = true;
    for ratio in [0.5, 0.67, 1.0, 2.0] {
        let p = SystemParams {
            g: ratio * base.kappa_d,
            ..base
        };
        let omega = (p.g * p.g - p.kappa_d * p.kappa_d / 16.0).sqrt();
        let t_max = (150e-9f64).max(2.5 * PI / omega);
        let samples = (t_max / 0.05e-9).round() as usize;
        let tr = resonant_decay(&p, t_max, samples, &opts).map_err(|e| e.to_string())?;
        let t_ns: Vec<f64> = tr.times().iter().map(|t| t * 1e9).collect();
        let fit = analyze_damped(&t_ns, &tr.population(1), 0.0);
        // underdamped single-excitation oracle: |c_e|² envelope decays at κ/2
        let oracle_ns = 1e9 * 2.0 / p.kappa_d;
        match fit.envelope {
            Some(env) => {
                pass &= ensure(
                    (env / oracle_ns - 1.0).abs() < 0.05,
                    &mut notes,
                    format!("g/κ = {ratio}: envelope {env:.3} ns vs {oracle_ns:.3} ns"),
                );
            }
            None => pass &= ensure(false, &mut notes, format!("g/κ = {ratio}: no envelope")),
        }
    }
    finish(pass, notes)
}

fn criterion_3() -> Check {
    let p = SystemParams {
        t_bath: 0.0,
        t1_int: None,
        ..Default::default()
    };
    let tp: Vec<f64> = (0..=240).map(|k| k as f64 * 0.25).collect();
    let cut = fringe_linecut(&p, &tp).map_err(|e| e.to_string())?;
    let mut notes = Vec::new();
    let (g, k) = (p.g, p.kappa_d);
    let undamped = 1e9 * PI / (2.0 * g);
    // first zero of e^{−κt/4}(cos Ωt + κ/(4Ω) sin Ωt)
    let om = (g * g - k * k / 16.0).sqrt();
    let damped = 1e9 * (PI - (4.0 * om / k).atan()) / om;
    notes.push(format!(
        "oracles: undamped π/2g = {undamped:.2} ns, damped square pulse = {damped:.2} ns"
    ));
    let pass = match cut.fit.first_min {
        Some(t) => ensure(
            (21.0..=29.0).contains(&t),
            &mut notes,
            format!("simulated first minimum {t:.2} ns, window [21, 29] ns"),
        ),
        None => ensure(false, &mut notes, "no minimum in the line-cut".into()),
    };
    finish(pass, notes)
}

fn criterion_4() -> Check {
    let p = SystemParams::default();
    let mut notes = Vec::new();
    let s = PulseSchedule::square(p.omega_q_max, p.omega_d, BENCHMARK_PLATEAU);
    let opts = EvolveOptions::default();
    let from_g = run_schedule(&p, &[1.0, 0.0], &s, &opts).map_err(|e| e.to_string())?;
    let from_e = run_schedule(&p, &[0.0, 1.0], &s, &opts).map_err(|e| e.to_string())?;
    // detailed-balance oracle for a two-level system swapping with a thermal mode
    let n = 1.0 / ((HBAR * p.omega_d / (BOLTZMANN * p.t_bath)).exp() - 1.0);
    let oracle = n / (1.0 + 2.0 * n);
    notes.push(format!("detailed-balance oracle {:.4}%", 100.0 * oracle));
    let mut pass = true;
    for (label, pe) in [("from g", from_g[1]), ("from e", from_e[1])] {
        pass &= ensure(
            (pe - 0.0135).abs() <= 0.0015,
            &mut notes,
            format!(
                "steady P_e {label} = {:.4}% (target 1.35 ± 0.15%)",
                100.0 * pe
            ),
        );
    }
    let ro = ReadoutModel::default();
    let r = benchmark_eg_reset(
        &p,
        p.omega_d,
        BENCHMARK_PLATEAU,
        &Preparation::calibrated(),
        &ro,
    )
    .map_err(|e| e.to_string())?;
    let before = r.assigned_before.get(1, 1);
    let after = r.measured(InitialState::E, 1);
    notes.push(format!(
        "prepared e, assigned e before reset {:.2}%",
        100.0 * before
    ));
    pass &= ensure(
        (after - 0.0265).abs() <= 0.01,
        &mut notes,
        format!(
            "prepared e, assigned e after reset {:.2}% (target 2.65 ± 1%, {} shots)",
            100.0 * after,
            ro.shots
        ),
    );
    finish(pass, notes)
}

fn criterion_5() -> Check {
    let mut notes = Vec::new();
    let mut pass = true;
    for (f, pe, target) in [(4.86e9, 0.0034, 0.041), (4.37e9, 0.0135, 0.049)] {
        let w = TAU * f;
        let t = effective_temperature(w, pe).map_err(|e| e.to_string())?;
        let oracle = HBAR * w / (BOLTZMANN * ((1.0 - pe) / pe).ln());
        pass &= ensure(
            (t - target).abs() <= 1e-3 && (t / oracle - 1.0).abs() < 1e-12,
            &mut notes,
            format!(
                "{:.2} GHz, {:.2}% → {:.2} mK (target {:.0} ± 1 mK, oracle {:.2} mK)",
                f / 1e9,
                100.0 * pe,
                1e3 * t,
                1e3 * target,
                1e3 * oracle
            ),
        );
    }
    finish(pass, notes)
}

fn criterion_6() -> Check {
    let err = |e: qreset::rf::NetworkError| e.to_string();
    let order = LadderTopology::DEFAULT_ORDER;
    let mut notes = Vec::new();
    let mut pass = true;
    let mut fitted = Vec::new();
    for (topo, init, target, name) in [
        (
            LadderTopology::lowpass(order),
            LadderValues {
                inductance: DESIGN_L2,
                capacitance: DESIGN_C2,
            },
            LOWPASS_CUTOFF_HZ,
            "LP",
        ),
        (
            LadderTopology::highpass(order),
            LadderValues {
                inductance: DESIGN_L1,
                capacitance: DESIGN_C1,
            },
            HIGHPASS_CUTOFF_HZ,
            "HP",
        ),
    ] {
        let fit = fit_elements(&topo, &[FitTarget::cutoff(target).into()], init).map_err(err)?;
        let chain = topo.build(&fit.values);
        let fc = find_cutoff(&chain, -3.0, (1e9, 12e9)).map_err(err)?;
        pass &= ensure(
            (fc / target - 1.0).abs() <= 0.01,
            &mut notes,
            format!(
                "{name} −3 dB at {:.4} GHz (target {:.2} GHz ± 1%), L = {:.3} nH, C = {:.3} pF",
                fc / 1e9,
                target / 1e9,
                fit.values.inductance * 1e9,
                fit.values.capacitance * 1e12
            ),
        );
        fitted.push(chain);
    }
    let hp = fitted.pop().expect("two branches");
    let lp = fitted.pop().expect("two branches");
    let spec = DiplexerSpec::new(lp, hp);
    let grid = FrequencyGrid::linear(1e9, 10e9, 5e6).map_err(err)?;
    let iso = diplexer_isolation(&spec, &grid).map_err(err)?;
    notes.push(format!(
        "isolation worst {:.1} dB at {:.3} GHz; gap to −60 dB: {:+.1} dB",
        iso.worst_db,
        iso.worst_freq_hz / 1e9,
        iso.worst_db + 60.0
    ));
    pass &= ensure(
        iso.worst_db <= -40.0,
        &mut notes,
        "isolation ≤ −40 dB over 1–10 GHz".into(),
    );
    finish(pass, notes)
}

fn design_cavity() -> Result<Cavity, String> {
    let lp = LadderTopology::lowpass(LadderTopology::DEFAULT_ORDER).build(&LadderValues {
        inductance: DESIGN_L2,
        capacitance: DESIGN_C2,
    });
    let mut cav = Cavity::symmetric(LineParams::from_permittivity(50.0, 0.025, 6.45, 0.0), lp);
    cav.line.phase_velocity =
        calibrate_phase_velocity(&cav, TAU * 4.23e9, 2).map_err(|e| e.to_string())?;
    Ok(cav)
}

fn criterion_7() -> Check {
    let err = |e: qreset::modes::ModeError| e.to_string();
    let cav = design_cavity()?;
    let mut notes = vec![format!(
        "calibrated v = {:.4e} m/s, ε_eff = {:.3}",
        cav.line.phase_velocity,
        cav.line.eps_eff()
    )];
    let modes = find_modes(&cav, (3.5e9, 6.0e9)).map_err(err)?;
    let Some(m) = modes.iter().find(|m| m.is_full_wave()) else {
        return Err("no full-wave mode in 3.5–6 GHz".into());
    };
    let mut pass = ensure(
        (m.freq_hz() - 4.23e9).abs() <= 10e6,
        &mut notes,
        format!(
            "full-wave mode at {:.4} GHz (target 4.23 GHz ± 10 MHz)",
            m.freq_hz() / 1e9
        ),
    );
    let k = linewidth_roundtrip(&cav, m).map_err(err)?;
    let span = 8.0 * k / TAU;
    let grid = FrequencyGrid::linspace(m.freq_hz() - span, m.freq_hz() + span, 2001)
        .map_err(|e| e.to_string())?;
    let est = linewidth_lorentzian(&cav.chain().map_err(err)?, &grid).map_err(err)?;
    pass &= ensure(
        (est.omega - m.omega).abs() <= k / 4.0,
        &mut notes,
        format!(
            "Lorentzian centre offset {:.3} kHz, κ/4 = {:.3} kHz",
            (est.omega - m.omega) / TAU / 1e3,
            k / 4.0 / TAU / 1e3
        ),
    );
    finish(pass, notes)
}

fn criterion_8() -> Check {
    let err = |e: qreset::modes::ModeError| e.to_string();
    let mut notes = Vec::new();
    let mut pass = true;
    let mut checked = 0;
    let base = design_cavity()?;
    for length in [0.020, 0.025, 0.030] {
        for alpha in [0.0, 0.1, 0.3] {
            let mut cav = base.clone();
            cav.line.length = length;
            cav.line.attenuation = alpha;
            for m in find_modes(&cav, (3.5e9, 9.0e9)).map_err(err)? {
                if !m.finesse().is_some_and(|f| f > 50.0) {
                    continue;
                }
                let k = linewidth_roundtrip(&cav, &m).map_err(err)?;
                let span = 8.0 * k / TAU;
                let grid = FrequencyGrid::linspace(m.freq_hz() - span, m.freq_hz() + span, 1601)
                    .map_err(|e| e.to_string())?;
                let est = linewidth_lorentzian(&cav.chain().map_err(err)?, &grid).map_err(err)?;
                let rel = est.kappa / k - 1.0;
                checked += 1;
                if rel.abs() >= 0.2 {
                    pass &= ensure(
                        false,
                        &mut notes,
                        format!(
                            "L = {length} m, α = {alpha}, {:.3} GHz: rel {rel:+.3}",
                            m.freq_hz() / 1e9
                        ),
                    );
                }
            }
        }
    }
    pass &= ensure(
        checked > 0,
        &mut notes,
        format!("{checked} modes with finesse > 50 agree within 20%"),
    );

    let m = find_modes(&base, (4.0e9, 4.5e9)).map_err(err)?[0];
    let k0 = linewidth_roundtrip(&base, &m).map_err(err)?;
    let alpha = required_attenuation(&base, &m, TAU * 15e6).map_err(err)?;
    let mut lossy = base.clone();
    lossy.line.attenuation = alpha;
    let grid = FrequencyGrid::linspace(m.freq_hz() - 100e6, m.freq_hz() + 100e6, 4001)
        .map_err(|e| e.to_string())?;
    let est = linewidth_lorentzian(&lossy.chain().map_err(err)?, &grid).map_err(err)?;
    notes.push(format!(
        "leakage-only κ/2π = {:.3} MHz; α for 15 MHz = {alpha:.4} Np/m (Lorentzian check {:.3} MHz)",
        mhz(k0),
        mhz(est.kappa)
    ));
    let lp = LadderTopology::lowpass(LadderTopology::DEFAULT_ORDER).build(&LadderValues {
        inductance: DESIGN_L2,
        capacitance: DESIGN_C2,
    });
    let s11 = lp.s_params(TAU * 4.8e9).map_err(|e| e.to_string())?.s11;
    let sup = purcell_suppression(s11).map_err(err)?;
    notes.push(format!(
        "LP Purcell suppression at 4.8 GHz: {:.1} dB",
        sup.db
    ));
    finish(pass, notes)
}

fn criterion_9() -> Check {
    let p = SystemParams::default();
    let mut notes = Vec::new();
    let prep = Preparation::calibrated();
    let r = concatenated_reset(&p, BENCHMARK_PLATEAU, &prep, &ReadoutModel::default())
        .map_err(|e| e.to_string())?;
    let row = r.prepared.iter().position(|l| l == "f").expect("f row");
    let before = r.before[row][2];
    let true_after = r.after[row][2];
    let assigned_after = r.measured(InitialState::F, 2);
    let assigned_before = r.assigned_before.get(row, 2);
    let mut pass = ensure(
        (assigned_before - 0.658).abs() <= 0.01,
        &mut notes,
        format!(
            "prepared f before reset: true P_f {:.2}%, assigned f {:.2}% (65.8 ± 1%)",
            100.0 * before,
            100.0 * assigned_before
        ),
    );
    pass &= ensure(
        assigned_after <= 0.02 && true_after <= 0.02,
        &mut notes,
        format!(
            "after fe+eg: true P_f {:.3}%, assigned f {:.3}% (≤ 2%)",
            100.0 * true_after,
            100.0 * assigned_after
        ),
    );
    let p3 = p.three_level();
    let model = LindbladModel::new(p3).map_err(|e| e.to_string())?;
    let h = model.hamiltonian(0.0);
    let ef = h[(model.index(2, 0), model.index(1, 1))];
    pass &= ensure(
        ef.re == SQRT_2 * p3.g && ef.im == 0.0,
        &mut notes,
        format!("e–f element {:e} = √2·g = {:e}", ef.re, SQRT_2 * p3.g),
    );
    let mut worst: f64 = 0.0;
    for n in 1..p3.fock_cutoff - 1 {
        // ⟨f, n| g b†a |e, n+1⟩ = g√2·√(n+1)
        let v = h[(model.index(2, n), model.index(1, n + 1))];
        worst = worst.max((v / (SQRT_2 * (n as f64 + 1.0).sqrt() * p3.g) - 1.0).norm());
    }
    pass &= ensure(
        worst < 1e-15,
        &mut notes,
        format!("photon-dressed e–f elements within {worst:.1e}"),
    );
    finish(pass, notes)
}

fn criterion_10() -> Check {
    let mut notes = Vec::new();
    let p = SystemParams::default().three_level();
    let model = LindbladModel::new(p).map_err(|e| e.to_string())?;
    let rho0 = DensityMatrix::product(&[0.0, 0.5, 0.5], &p).map_err(|e| e.to_string())?;
    let s = PulseSchedule::ladder(
        p.omega_q_max,
        &[
            qreset::dynamics::Plateau {
                omega: p.resonant_plateau(2),
                duration: 100e-9,
            },
            qreset::dynamics::Plateau {
                omega: p.resonant_plateau(1),
                duration: 100e-9,
            },
        ],
    );
    let times: Vec<f64> = (0..=40).map(|k| s.duration() * k as f64 / 40.0).collect();
    let run = |opts: &EvolveOptions| evolve_lindblad(&model, &rho0, &s, &times, opts);
    let coarse = run(&EvolveOptions::default()).map_err(|e| e.to_string())?;
    let drift = coarse
        .points
        .iter()
        .map(|q| q.trace_err)
        .fold(0.0, f64::max);
    let per_100ns = drift * 100e-9 / s.duration();
    let mut pass = ensure(
        per_100ns < 1e-7,
        &mut notes,
        format!(
            "trace drift {drift:.1e} over {:.0} ns ({per_100ns:.1e} per 100 ns)",
            s.duration() * 1e9
        ),
    );
    let fine = run(&EvolveOptions {
        max_step: Some(coarse.min_step / 2.0),
        ..Default::default()
    })
    .map_err(|e| e.to_string())?;
    let diff = coarse
        .points
        .iter()
        .zip(&fine.points)
        .flat_map(|(a, b)| {
            a.populations
                .iter()
                .zip(&b.populations)
                .map(|(x, y)| (x - y).abs())
        })
        .fold(0.0, f64::max);
    pass &= ensure(
        diff < 1e-6,
        &mut notes,
        format!(
            "step halving ({} → {} steps) max population change {diff:.1e}",
            coarse.steps, fine.steps
        ),
    );

    let ro = ReadoutModel::default();
    let rows = vec![
        vec![0.9, 0.08, 0.02],
        vec![0.1, 0.85, 0.05],
        vec![0.2, 0.1, 0.7],
    ];
    let run_mc = |threads: usize| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .expect("thread pool")
            .install(|| {
                let m = assignment_matrix(&rows, &ro).expect("valid rows");
                let shots = sample_shots(&rows[1], &ro).expect("valid row");
                let mut bytes: Vec<u8> =
                    m.p.iter().flatten().flat_map(|x| x.to_le_bytes()).collect();
                for s in shots {
                    bytes.extend(s.iq[0].to_le_bytes());
                    bytes.extend(s.iq[1].to_le_bytes());
                    bytes.extend((s.true_state as u64).to_le_bytes());
                }
                bytes
            })
    };
    let (a, b, c) = (run_mc(1), run_mc(1), run_mc(4));
    pass &= ensure(
        a == b && a == c,
        &mut notes,
        format!(
            "Monte-Carlo output ({} bytes) identical across reruns and 1/4 threads",
            a.len()
        ),
    );
    finish(pass, notes)
}

fn main() -> ExitCode {
    type Criterion = (u32, &'static str, fn() -> Check);
    let criteria: [Criterion; 10] = [
        (1, "closed-form decay rate", criterion_1),
        (2, "simulated envelope vs closed form", criterion_2),
        (3, "first fringe minimum", criterion_3),
        (4, "reset depth", criterion_4),
        (5, "thermal conversions", criterion_5),
        (6, "filter cutoffs and isolation", criterion_6),
        (7, "mode location", criterion_7),
        (8, "linewidth cross-validation", criterion_8),
        (9, "three-level ladder", criterion_9),
        (10, "numerical hygiene", criterion_10),
    ];
    let outcomes: Vec<Outcome> = criteria
        .into_iter()
        .map(|(id, name, f)| {
            let t0 = Instant::now();
            let (pass, notes) = match f() {
                Ok(n) => (true, n),
                Err(e) => (false, vec![e]),
            };
            Outcome {
                id,
                name,
                pass,
                notes,
                secs: t0.elapsed().as_secs_f64(),
            }
        })
        .collect();

    println!();
    for o in &outcomes {
        println!(
            "{} criterion {:>2}: {} ({:.2} s)",
            if o.pass { "PASS" } else { "FAIL" },
            o.id,
            o.name,
            o.secs
        );
        for n in &o.notes {
            println!("      {n}");
        }
    }
    let failed = outcomes.iter().filter(|o| !o.pass).count();
    println!(
        "\nacceptance: {} passed, {failed} failed\n",
        outcomes.len() - failed
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
