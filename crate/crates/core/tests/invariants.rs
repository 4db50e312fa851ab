mod common;

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use subtag::adversary::{assemble_system, count_consistent_keys, CoalitionView};
use subtag::network::Topology;
use subtag::scheme::{distribute, keygen, label, tag_basis, verify, read_packets, write_packets, TaggedPacket, WireMode};

use common::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn honest_combinations_verify(seed in any::<u64>(), a in 0u32..5, b in 0u32..5) {
        let pp = rs63();
        let mk = keygen(&pp, seed);
        let keys = distribute(&pp, &mk);
        let mut rng = ChaCha20Rng::seed_from_u64(seed);
        let basis = random_basis(&pp, &mut rng);
        let packets = tag_basis(&pp, &mk, &basis).unwrap();
        let mixed = TaggedPacket::combine(&pp, &[a, b], &packets).unwrap();
        for k in &keys {
            prop_assert!(verify(&pp, k, &pp.column(k.index).unwrap(), &mixed));
        }
    }

    #[test]
    fn label_is_linear(seed in any::<u64>(), a in 0u32..5, b in 0u32..5) {
        let pp = rs63();
        let f = pp.ext();
        let keys = distribute(&pp, &keygen(&pp, seed));
        let mut rng = ChaCha20Rng::seed_from_u64(seed);
        let basis = random_basis(&pp, &mut rng);
        let packets = tag_basis(&pp, &keygen(&pp, seed), &basis).unwrap();
        let mixed = TaggedPacket::combine(&pp, &[a, b], &packets).unwrap();
        let vk = &keys[0];
        let lhs = label(&pp, vk, mixed.tracker, &mixed.payload).unwrap();
        let l0 = label(&pp, vk, packets[0].tracker, &packets[0].payload).unwrap();
        let l1 = label(&pp, vk, packets[1].tracker, &packets[1].payload).unwrap();
        prop_assert_eq!(lhs, f.add(f.scale(a, l0), f.scale(b, l1)));
    }

    #[test]
    fn random_networks_deliver_verifiable_packets(seed in any::<u64>()) {
        let pp = rs63();
        let mut rng = ChaCha20Rng::seed_from_u64(seed);
        let topo = Topology::random_dag(&mut rng);
        let net = topo.instantiate(pp.symbols(), pp.n(), &mut rng).unwrap();
        let mk = keygen(&pp, seed);
        let keys = distribute(&pp, &mk);
        let basis = random_basis(&pp, &mut rng);
        let symbols: Vec<_> = tag_basis(&pp, &mk, &basis).unwrap().iter().map(|p| p.to_symbols(&pp)).collect();
        let tx = net.transmit(&net.compute_global_kernels(), &symbols).unwrap();
        for (i, node) in topo.nodes().iter().enumerate() {
            if let Some(v) = node.verifier {
                for s in net.received(&tx, i) {
                    let pkt = TaggedPacket::from_symbols(&pp, s).unwrap();
                    prop_assert!(verify(&pp, &keys[v - 1], &pp.column(v).unwrap(), &pkt));
                }
            }
        }
        prop_assert_eq!(Topology::parse(&topo.to_text()).unwrap().to_text(), topo.to_text());
    }

    #[test]
    fn wire_round_trip(seed in any::<u64>(), binary in any::<bool>()) {
        let pp = rs63();
        let mk = keygen(&pp, seed);
        let mut rng = ChaCha20Rng::seed_from_u64(seed);
        let packets = tag_basis(&pp, &mk, &random_basis(&pp, &mut rng)).unwrap();
        let mode = if binary { WireMode::Binary } else { WireMode::Text };
        let mut buf = Vec::new();
        write_packets(&pp, &packets, mode, &mut buf).unwrap();
        let back = read_packets(&pp, &mut buf.as_slice()).unwrap();
        prop_assert_eq!(back, packets);
    }

    #[test]
    fn key_count_matches_nullity(seed in any::<u64>(), mask in 0u32..64) {
        let pp = rs63();
        let mk = keygen(&pp, seed);
        let keys = distribute(&pp, &mk);
        let members: Vec<usize> = (1..=6).filter(|i| mask >> (i - 1) & 1 == 1).collect();
        let mut rng = ChaCha20Rng::seed_from_u64(seed);
        let packets = tag_basis(&pp, &mk, &random_basis(&pp, &mut rng)).unwrap();
        let view = CoalitionView::new(&pp, pick(&keys, &members), packets).unwrap();
        let count = count_consistent_keys(&pp, &assemble_system(&view)).unwrap();
        prop_assert_eq!(&count.measured, &count.predicted);
        // the true key is always consistent
        prop_assert!(count.measured >= 1u32.into());
    }
}
