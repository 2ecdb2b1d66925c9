use diqkd_core::circuit::preset;
use diqkd_core::fock::FockState;
use diqkd_core::gaussian::GateKind;
use diqkd_core::metrics::{chsh_score, key_rate, BehaviorTable};
use diqkd_core::DetectorModel;
use diqkd_opt::{efficiency_sweep, OptimizerConfig};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() {
    let circuit = preset("loss_tolerant").unwrap();
    let cfg = OptimizerConfig::default();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let schedule = efficiency_sweep(&circuit, 0.0, 1e-4, &cfg, &mut rng).unwrap();
    let row = schedule
        .rows
        .iter()
        .find(|r| r.loss > 0.30)
        .unwrap();
    println!("loss {:.4} rate {:.6e}", row.loss, row.key_rate);
    println!("params {:?}", row.params);
    let det = DetectorModel::new(row.efficiency, 0.0).unwrap();
    let b = circuit.evaluate(&row.params, &det).unwrap();
    println!("gaussian S = {:.9}", chsh_score(&b));
    println!(
        "gaussian rate = {:.6e}",
        key_rate(&b, row.noise_p).unwrap().extended_rate
    );

    // Independent check through the number-basis path.
    let phi = &row.params;
    let cutoff = 40;
    let prep = FockState::<f64>::vacuum(2, cutoff)
        .unwrap()
        .apply_gate(GateKind::TwoModeSqueezer, &[phi[0], phi[1]], &[0, 1])
        .unwrap();
    let mut p = [[[[0.0f64; 3]; 2]; 2]; 2];
    for x in 0..2usize {
        for y in 0..3usize {
            let mut s = prep.clone();
            if x == 1 {
                s = s
                    .apply_gate(GateKind::SingleModeSqueezer, &[phi[3], 0.0], &[0])
                    .unwrap();
            }
            let a_disp = if x == 0 { phi[2] } else { phi[4] };
            let b_disp = [phi[5], phi[6], phi[7]][y];
            s = s
                .apply_gate(GateKind::Displacement, &[a_disp, 0.0], &[0])
                .unwrap()
                .apply_gate(GateKind::Displacement, &[0.0, b_disp], &[1])
                .unwrap();
            let probs = s.pattern_probabilities(&det, &[0, 1]);
            for a in 0..2usize {
                for bb in 0..2usize {
                    p[a][bb][x][y] = probs[a + 2 * bb];
                }
            }
        }
    }
    let table = BehaviorTable::from_fn(1.0, |a, b2, x, y| {
        p[a as usize][b2 as usize][x as usize][y as usize]
    })
    .unwrap();
    println!("fock S = {:.9}", chsh_score(&table));
    println!(
        "fock rate = {:.6e}",
        key_rate(&table, row.noise_p).unwrap().extended_rate
    );
}
