use qspicb_core::{Convention, QSPConfig};

/// Named inputs shared by the benchmarks.
pub struct Case {
    pub name: &'static str,
    pub b_seq: Vec<u8>,
    pub levi: Vec<usize>,
    pub config: QSPConfig,
}

pub fn cases() -> Vec<Case> {
    let case = |name, b_seq: &[u8], levi: &[usize], rank, conv| Case {
        name,
        b_seq: b_seq.to_vec(),
        levi: levi.to_vec(),
        config: QSPConfig::new(rank, conv),
    };
    vec![
        case("vvv_n4_part3", &[0, 0, 0], &[], 4, Convention::Part3),
        case("vwv_n4_part2", &[0, 1, 0], &[], 4, Convention::Part2),
        case(
            "ext_first_slot_n6_part3",
            &[0, 0, 0],
            &[0],
            6,
            Convention::Part3,
        ),
        case("vvv_n6_part3", &[0, 0, 0], &[], 6, Convention::Part3),
    ]
}
