//! Output helpers: readable state labels and small tables.

use dtsd_core::lts::Lts;

const MAX_LABEL: usize = 72;
const KEEP: usize = 56;

/// 64-bit FNV-1a; stable across platforms and releases.
fn fnv1a(s: &str) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in s.bytes() {
        h ^= u64::from(b);
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    h
}

/// Long labels are cut and given a hash suffix so distinct labels stay
/// distinguishable.
pub fn short_label(label: &str) -> String {
    if label.chars().count() <= MAX_LABEL {
        return label.to_string();
    }
    let head: String = label.chars().take(KEEP).collect();
    format!("{head}…#{:08x}", fnv1a(label) as u32)
}

/// Copy of `lts` with shortened labels, for text and DOT output.
pub fn display_lts(lts: &Lts) -> Lts {
    let mut out = lts.clone();
    for s in &mut out.states {
        s.label = short_label(&s.label);
        s.timer_free = short_label(&s.timer_free);
    }
    out
}

/// Transitions as CSV rows.
pub fn lts_csv(lts: &Lts) -> String {
    let mut out = String::from("from,step,probability,to\n");
    for t in &lts.transitions {
        out.push_str(&format!(
            "s{},\"{}\",{},s{}\n",
            t.from + 1,
            t.step.to_string().replace('"', "\"\""),
            dtsd_core::rational::fmt_q(&t.prob),
            t.to + 1
        ));
    }
    out
}
