use agentgc_core::predictor::{train_static, Mixer, ModelConfig, Network, StaticModel};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn cfg(seed: u64) -> ModelConfig {
    ModelConfig { vocab: 64, context: 4, embed_dim: 8, hidden_dim: 16, learning_rate: 0.05, seed }
}

fn mean_loss(model: &Network, tokens: &[u32]) -> f64 {
    let total: f64 = (1..tokens.len()).map(|i| -model.predict(&tokens[..i])[tokens[i] as usize].ln()).sum();
    total / (tokens.len() - 1) as f64
}

#[test]
fn mixer_follows_the_accurate_model() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut mixer = Mixer::new(2);
    let uniform = vec![1.0 / 64.0; 64];
    for _ in 0..200 {
        let target = rng.gen_range(0..64);
        let mut right = vec![0.03 / 63.0; 64];
        right[target] = 0.97;
        mixer.observe(&[&right, &uniform], target);
    }
    assert!(mixer.weights()[0] > 0.95, "{:?}", mixer.weights());
}

#[test]
fn one_pass_on_periodic_stream_cuts_loss() {
    let unit: Vec<u32> = vec![5, 17, 42, 8, 63, 0, 21];
    let tokens: Vec<u32> = unit.iter().copied().cycle().take(2000).collect();
    let before = mean_loss(&Network::new(cfg(3)).unwrap(), &tokens);
    let trained = train_static(&tokens, cfg(3), 1).unwrap();
    let after = mean_loss(trained.network(), &tokens);
    assert!(after <= 0.8 * before, "before {before}, after {after}");
}

#[test]
fn split_step_matches_update_and_replays_exactly() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let tokens: Vec<u32> = (0..500).map(|_| rng.gen_range(0..64)).collect();
    let mut a = Network::new(cfg(9)).unwrap();
    let mut b = Network::new(cfg(9)).unwrap();
    let mut s = b.scratch();
    for i in 0..tokens.len() {
        let la = a.update(&tokens[..i], tokens[i]).unwrap();
        b.forward(&tokens[..i], &mut s);
        let lb = b.backward(&mut s, tokens[i]);
        b.apply(&s);
        assert_eq!(la.to_bits(), lb.to_bits());
    }
    assert_eq!(a.params(), b.params());
    assert_ne!(a.params(), Network::new(cfg(10)).unwrap().params());
}

#[test]
fn static_model_file_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("m.agpw");
    let tokens: Vec<u32> = (0..300).map(|i| (i * 7 % 64) as u32).collect();
    let model = train_static(&tokens, cfg(1), 1).unwrap();
    model.save(&path).unwrap();
    let back = StaticModel::load(&path).unwrap();
    assert_eq!(back.network().params(), model.network().params());
    assert_eq!(back.predict(&tokens[..10]), model.predict(&tokens[..10]));
}
