use proptest::prelude::*;

use cryptbench::diffcrypt::build_ddt;
use cryptbench::evolve::one_point_crossover;
use cryptbench::finite_math::{gcd, gf_mul, mod_inverse, FieldPolynomial, Gf256};
use cryptbench::icrypt::{Icrypt, IcryptParams, KeyInjection};
use cryptbench::interpolation::{expanded_eval, horner_eval, lagrange_interpolate, newton_coefficients, probe_degree};
use cryptbench::modes::{mode_decrypt, mode_encrypt, BitStream, Mode, ModeState};
use cryptbench::neuralnet::{bits_to_vector, Activation, FeedforwardNetwork};
use cryptbench::toyciphers::{BasicSpn, BlockCipher, CubeCipher, Feistel32, HypCipher};

const M: FieldPolynomial = FieldPolynomial::RIJNDAEL;

fn distinct_points() -> impl Strategy<Value = Vec<(Gf256, Gf256)>> {
    (1usize..12, any::<u64>()).prop_map(|(n, seed)| {
        let mut xs: Vec<u8> = (0..=255).collect();
        // cheap deterministic shuffle
        let mut s = seed | 1;
        for i in (1..xs.len()).rev() {
            s ^= s << 13;
            s ^= s >> 7;
            s ^= s << 17;
            xs.swap(i, (s % (i as u64 + 1)) as usize);
        }
        xs.iter().take(n).map(|&x| (Gf256(x), Gf256((s >> (x % 56)) as u8 ^ x))).collect()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn spn_roundtrip(keys in any::<[u16; 5]>(), p in any::<u16>()) {
        let c = BasicSpn::new(keys);
        prop_assert_eq!(c.decrypt(c.encrypt(p)), p);
    }

    #[test]
    fn feistel_family_roundtrip(keys in any::<[u16; 4]>(), small in prop::collection::vec(any::<u8>(), 2..=4), p in any::<u32>()) {
        let f = Feistel32::new(keys);
        prop_assert_eq!(f.decrypt_block(f.encrypt_block(p as u64)), p as u64);
        let h = HypCipher::new(&small).unwrap();
        let q = p as u64 & 0xFFFF;
        prop_assert_eq!(h.decrypt_block(h.encrypt_block(q)), q);
        let c = CubeCipher::new(&small[..small.len().min(3)]).unwrap();
        prop_assert_eq!(c.decrypt_block(c.encrypt_block(q)), q);
    }

    #[test]
    fn icrypt_roundtrip_small_halves(
        half in prop::sample::select(vec![8u32, 16, 24, 40]),
        input in any::<bool>(),
        simplified in any::<bool>(),
        design in any::<u64>(),
        key in any::<(u64, u64)>(),
        block in any::<u128>(),
    ) {
        let variant = if input { KeyInjection::InputInjected } else { KeyInjection::BiasInjected };
        let params = IcryptParams::generate(variant, half, 4, simplified, design).unwrap();
        let mask = (1u128 << half) - 1;
        let cipher = Icrypt::new(&params, (key.0 as u128 & mask, key.1 as u128 & mask));
        let x = block & ((1u128 << (2 * half)) - 1);
        prop_assert_eq!(cipher.decrypt(cipher.encrypt(x)), x);
    }

    #[test]
    fn modes_roundtrip(
        mode in prop::sample::select(vec![Mode::Ecb, Mode::Cbc, Mode::Cfb, Mode::Ofb, Mode::Ctr]),
        r in 1u32..=16,
        keys in any::<[u16; 5]>(),
        iv in any::<u16>(),
        blocks in 1usize..6,
        seed in any::<u8>(),
    ) {
        let spn = BasicSpn::new(keys);
        let bits: Vec<bool> = (0..16 * r as usize * blocks).map(|i| (i * 7 + seed as usize) % 5 < 2).collect();
        let p = BitStream::from_bits(&bits);
        let st = match mode {
            Mode::Ecb => ModeState::new(mode, None, 16),
            _ => ModeState::new(mode, Some(iv as u64), r),
        };
        let c = mode_encrypt(&st, &spn, &p).unwrap();
        prop_assert_eq!(c.len(), p.len());
        prop_assert_eq!(mode_decrypt(&st, &spn, &c).unwrap(), p);
    }

    #[test]
    fn gf_field_laws(a in any::<u8>(), b in any::<u8>(), c in any::<u8>()) {
        let (a, b, c) = (Gf256(a), Gf256(b), Gf256(c));
        prop_assert_eq!(gf_mul(a, b, M), gf_mul(b, a, M));
        prop_assert_eq!(gf_mul(gf_mul(a, b, M), c, M), gf_mul(a, gf_mul(b, c, M), M));
        prop_assert_eq!(gf_mul(a, Gf256(b.0 ^ c.0), M), Gf256(gf_mul(a, b, M).0 ^ gf_mul(a, c, M).0));
        if a.0 != 0 {
            prop_assert_eq!(gf_mul(a, a.inverse().unwrap(), M), Gf256::ONE);
        }
    }

    #[test]
    fn modular_inverse_when_coprime(a in 1i64..5000, n in 2i64..5000) {
        match mod_inverse(a, n) {
            Ok(x) => {
                prop_assert!((0..n).contains(&x));
                prop_assert_eq!((a * x).rem_euclid(n), 1 % n);
            }
            Err(_) => prop_assert_ne!(gcd(a as u64, n as u64).unwrap(), 1),
        }
    }

    #[test]
    fn newton_agrees_with_lagrange(points in distinct_points(), x in any::<u8>()) {
        let poly = newton_coefficients(&points).unwrap();
        let l = lagrange_interpolate(&points, Gf256(x)).unwrap();
        prop_assert_eq!(horner_eval(&poly, Gf256(x)), l);
        prop_assert_eq!(expanded_eval(&poly, Gf256(x)), l);
        for &(px, py) in &points {
            prop_assert_eq!(horner_eval(&poly, px), py);
        }
        prop_assert!(probe_degree(&points).unwrap() < points.len());
    }

    #[test]
    fn ddt_laws_for_any_permutation(perm in Just((0u8..16).collect::<Vec<_>>()).prop_shuffle()) {
        let s: [u8; 16] = perm.try_into().unwrap();
        prop_assert!(build_ddt("p", &s).satisfies_structural_laws());
    }

    #[test]
    fn crossover_conserves_genes(a in any::<u64>(), b in any::<u64>(), width in 2u32..=64, pt in any::<u32>()) {
        let point = 1 + pt % (width - 1);
        let mask = if width == 64 { u64::MAX } else { (1 << width) - 1 };
        let (a, b) = (a & mask, b & mask);
        let (x, y) = one_point_crossover(a, b, width, point).unwrap();
        prop_assert_eq!(x ^ y, a ^ b);
        prop_assert_eq!(x & y, a & b);
        let suffix = (1u64 << (width - point)) - 1;
        prop_assert_eq!(x & suffix, a & suffix);
    }

    #[test]
    fn network_text_roundtrip(sizes in prop::collection::vec(1usize..5, 2..5), seed in any::<u64>()) {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let net = FeedforwardNetwork::random(&sizes, Activation::Sigmoid { lambda: 1.0 }, (-2.0, 2.0), &mut rng).unwrap();
        let back = FeedforwardNetwork::from_text(&net.to_text()).unwrap();
        prop_assert_eq!(back, net);
    }

    #[test]
    fn bit_vectors_are_msb_first(v in any::<u16>()) {
        let bits = bits_to_vector(v as u64, 16);
        let back = bits.iter().fold(0u64, |acc, &b| acc << 1 | (b > 0.5) as u64);
        prop_assert_eq!(back, v as u64);
        prop_assert_eq!(bits[0] > 0.5, v & 0x8000 != 0);
    }
}
