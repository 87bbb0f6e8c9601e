//! Zeros of the builtin interaction function and their classification.

use spot_rings::KernelParams;

fn main() {
    let k = KernelParams::FIG1;
    println!("kernel hash {}", k.content_hash());
    for z in k.find_zeros(0.12, 0.45) {
        println!("d_c = {:.4}  {:?}  slope {:+.3e}", z.d_c, z.kind, k.slope(z.d_c));
    }
}
