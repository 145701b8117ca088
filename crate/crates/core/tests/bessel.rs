#![allow(clippy::approx_constant, clippy::excessive_precision)]

use proptest::prelude::*;
use sem_fourier::bessel::{bessel_column, bessel_identity_residual};
use std::f64::consts::PI;

// (r, p, j_p(r)) from 50-digit arithmetic.
const REFERENCE: &[(f64, usize, f64)] = &[
    (0.1, 0, 9.9833416646828152288e-1),
    (0.1, 1, 3.3300011902557571571e-2),
    (0.1, 2, 6.6619060844556877977e-4),
    (0.1, 5, 9.6163102329164487127e-10),
    (0.1, 10, 7.2715109967136755864e-21),
    (0.1, 18, 1.2192377198447588187e-40),
    (0.1, 30, 5.6107483780043960985e-73),
    (0.1, 64, 4.7051149692850991018e-174),
    (0.4999, 0, 9.5886732936793865742e-1),
    (0.4999, 1, 1.625061598553675426e-1),
    (0.4999, 2, 1.6364676165373239056e-2),
    (0.4999, 5, 2.9745020532530092542e-6),
    (0.4999, 10, 7.0500237556347272118e-14),
    (0.4999, 18, 4.6200748226543710345e-28),
    (0.4999, 30, 5.1842744669453981785e-52),
    (0.4999, 64, 2.5158997258429792047e-129),
    (0.5, 0, 9.5885107720840600055e-1),
    (0.5, 1, 1.6253703063606656886e-1),
    (0.5, 2, 1.6371106607993412617e-2),
    (0.5, 5, 2.9774668754574455816e-6),
    (0.5, 10, 7.064123963661878184e-14),
    (0.5, 18, 4.6367327906390863427e-28),
    (0.5, 30, 5.2154726081997028857e-52),
    (0.5, 64, 2.5483125167501187426e-129),
    (1.0, 0, 8.4147098480789650665e-1),
    (1.0, 1, 3.0116867893975678925e-1),
    (1.0, 2, 6.2035052011373861102e-2),
    (1.0, 5, 9.2561158611258163567e-5),
    (1.0, 10, 7.116552640047313024e-11),
    (1.0, 18, 1.2038557422082003867e-22),
    (1.0, 30, 5.5668312669813471501e-43),
    (1.0, 64, 4.6873691339157658825e-110),
    (3.141592653589793, 0, 3.8981718325193755985e-17),
    (3.141592653589793, 1, 3.1830988618379069635e-1),
    (3.141592653589793, 2, 3.039635509270133109e-1),
    (3.141592653589793, 5, 1.9935413383293575544e-2),
    (3.141592653589793, 10, 5.4855465901420967251e-6),
    (3.141592653589793, 18, 9.5437287041169676527e-14),
    (3.141592653589793, 30, 4.2608078299425896529e-28),
    (3.141592653589793, 64, 2.9772414131678687882e-78),
    (7.5, 0, 1.2506666356996518106e-1),
    (7.5, 1, -2.9542487235341417322e-2),
    (7.5, 2, -1.3688365846410174799e-1),
    (7.5, 5, 1.5685479594803492783e-1),
    (7.5, 10, 1.1259830915291588809e-2),
    (7.5, 18, 3.2982412839434919315e-7),
    (7.5, 30, 6.3922807146384231672e-17),
    (7.5, 64, 3.8292684449801262291e-54),
    (31.4, 0, -5.0719307643636305921e-4),
    (31.4, 1, -3.1859247403962394189e-2),
    (31.4, 2, -2.5366840640695983068e-3),
    (31.4, 5, -2.8718337758279769762e-2),
    (31.4, 10, -3.226713683679150403e-2),
    (31.4, 18, 2.2300922547289265002e-2),
    (31.4, 30, 3.9900664048813983919e-2),
    (31.4, 64, 6.1895408802142095854e-16),
    (100.0, 0, -5.0636564110975879366e-3),
    (100.0, 1, -8.6738252869878152204e-3),
    (100.0, 2, 4.80344165248795348e-3),
    (100.0, 5, -9.2901489349075717663e-3),
    (100.0, 10, -1.9565785971342900596e-4),
    (100.0, 18, -9.3416343719241440387e-3),
    (100.0, 30, 8.7006285144475758186e-3),
    (100.0, 64, 8.8987322271254864078e-3),
    (150.0, 0, -4.7658428641944308762e-3),
    (150.0, 1, -4.6934443289504637486e-3),
    (150.0, 2, 4.6719739776154216013e-3),
    (150.0, 5, -5.1159175385022643602e-3),
    (150.0, 10, 2.7803570144551367165e-3),
    (150.0, 18, -2.263151428924596972e-3),
    (150.0, 30, -4.9594364287654723333e-3),
    (150.0, 64, 4.6790359101606093917e-3),
    (200.0, 0, -4.3664864860699729087e-3),
    (200.0, 1, -2.4577708074653794163e-3),
    (200.0, 2, 4.3296199239579922174e-3),
    (200.0, 5, -2.756802734336175053e-3),
    (200.0, 10, 3.5431728903142449403e-3),
    (200.0, 18, 1.0265463420136027911e-3),
    (200.0, 30, -4.8000459492406408281e-3),
    (200.0, 64, -3.1988767534237483663e-5),
    (777.25, 0, -1.2313151701057395241e-3),
    (777.25, 1, 3.7147063010996148377e-4),
    (777.25, 2, 1.2327489583210240329e-3),
    (777.25, 5, 3.4922816991443761288e-4),
    (777.25, 10, 1.2546672720512171022e-3),
    (777.25, 18, 1.2832321856500987359e-3),
    (777.25, 30, 1.2280052981625701785e-3),
    (777.25, 64, 9.3583044122316799314e-4),
    (1000.0, 0, 8.2687954053200256026e-4),
    (1000.0, 1, -5.6155219675017098852e-4),
    (1000.0, 2, -8.2856419712225307322e-4),
    (1000.0, 5, -5.4991718119978627823e-4),
    (1000.0, 10, -8.5656826028064375453e-4),
    (1000.0, 18, -9.1059826200531642769e-4),
    (1000.0, 30, -9.9150169301899812069e-4),
    (1000.0, 64, 8.7315539978810241151e-5),
    (20000.5, 0, 4.5029293171423969708e-5),
    (20000.5, 1, -2.172878080754529217e-5),
    (20000.5, 2, -4.5032552407064210496e-5),
    (20000.5, 5, -2.1697255388571467412e-5),
    (20000.5, 10, -4.5088884783328378646e-5),
    (20000.5, 18, -4.521345048044464994e-5),
    (20000.5, 30, -4.5522338658833049241e-5),
    (20000.5, 64, 4.7042029430907720039e-5),
];

// envelope-scaled check across the Miller range, including near-zero values
const LARGE_ARGUMENT: &[(f64, usize, f64)] = &[
    (1609.0, 0, 0.0003004496637878956),
    (1609.0, 2, -0.0003014637152142198),
    (1609.0, 7, 0.0005387486447714384),
    (1609.0, 18, -0.0003564788453084606),
    (1609.0, 40, 0.0005277837502617464),
    (1609.0, 64, 0.0006058500998621963),
    (3217.7762754393457, 0, 0.00021975013818820296),
    (3217.7762754393457, 2, -0.0002199549521592529),
    (3217.7762754393457, 7, 0.0002178299451869134),
    (3217.7762754393457, 18, -0.0002311143807217683),
    (3217.7762754393457, 40, 0.00026806020624277127),
    (3217.7762754393457, 64, 0.0003078085530881508),
    (5000.5, 0, -0.00015855817107417213),
    (5000.5, 2, 0.00015848503979759804),
    (5000.5, 7, 0.00012275193177821312),
    (5000.5, 18, 0.00015429940713030323),
    (5000.5, 40, -0.00013653861601975315),
    (5000.5, 64, -9.579882698254912e-05),
    (9999.99, 0, -2.960780093831253e-05),
    (9999.99, 2, 2.9636455023001868e-05),
    (9999.99, 7, -9.543321801544235e-05),
    (9999.99, 18, 3.123675324618711e-05),
    (9999.99, 40, -3.733206323302e-05),
    (9999.99, 64, -4.869469848379579e-05),
];

#[test]
fn matches_high_precision_reference() {
    for &(r, p, expect) in REFERENCE {
        let got = bessel_column(r, 64).unwrap().get(p);
        let err = (got - expect).abs();
        if expect.abs() > 1e-280 {
            assert!(err <= 1e-12 * expect.abs(), "r={r} p={p}: {got} vs {expect}");
        } else {
            assert!(err <= 1e-292, "r={r} p={p}: {got} vs {expect}");
        }
        let neg = bessel_column(-r, 64).unwrap().get(p);
        let sign = if p % 2 == 0 { 1.0 } else { -1.0 };
        assert_eq!(neg, sign * got);
    }
}

#[test]
fn large_arguments_hold_absolute_accuracy() {
    for &(r, p, expect) in LARGE_ARGUMENT {
        let got = bessel_column(r, 64).unwrap().get(p);
        assert!((got - expect).abs() * r <= 1e-12, "r={r} p={p}: {got} vs {expect}");
    }
}

#[test]
fn identity_residual_grid() {
    for &r in &[0.1, 1.0, PI, 10.0, 31.4, 100.0] {
        for p in 0..=18 {
            let res = bessel_identity_residual(r, p, 400).unwrap();
            assert!(res <= 1e-10, "r={r} p={p}: {res}");
        }
    }
}

#[test]
fn three_term_recurrence_consistency() {
    for i in 0..400 {
        let r = 1.0 + i as f64 * 2.4937;
        let col = bessel_column(r, 40).unwrap();
        let b = col.values();
        for p in 1..40 {
            let lhs = b[p - 1] + b[p + 1];
            let rhs = (2 * p + 1) as f64 * b[p] / r;
            let scale = b[p - 1].abs().max(b[p + 1].abs()).max(rhs.abs());
            assert!((lhs - rhs).abs() <= 1e-10 * scale, "r={r} p={p}");
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(10_000))]
    #[test]
    fn parity_and_bound(r in -1000.0f64..1000.0, p in 0usize..=64) {
        let pos = bessel_column(r.abs(), p).unwrap().get(p);
        let neg = bessel_column(-r.abs(), p).unwrap().get(p);
        let sign = if p % 2 == 0 { 1.0 } else { -1.0 };
        prop_assert!((neg - sign * pos).abs() <= 1e-14 * pos.abs());
        prop_assert!(pos.abs() <= 1.0);
    }
}
