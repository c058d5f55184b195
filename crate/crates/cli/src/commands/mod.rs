mod eval;
mod gap;
mod optimize;
mod verify;

pub use eval::eval_region;
pub use gap::gap_check;
pub use optimize::optimize;
pub use verify::verify;

use cran_core::regions::{Codeword, DecodingOrder};

/// `q0 m1 q1 m0`: quantization and message codewords in decoding order.
pub fn order_label(order: &DecodingOrder) -> String {
    let items: Vec<String> = order
        .items()
        .iter()
        .map(|c| match c {
            Codeword::Quantization(l) => format!("q{l}"),
            Codeword::Message(k) => format!("m{k}"),
        })
        .collect();
    items.join(" ")
}
