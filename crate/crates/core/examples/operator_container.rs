//! Saving a dense channel to the binary container and reading it back.

use rotor_channels::io::container::{read_operator, write_operator, ContainerHeader};
use rotor_channels::linalg::max_abs_diff;
use rotor_channels::quantum::FactoredChannel;
use rotor_channels::SystemParams;

fn main() -> rotor_channels::Result<()> {
    let p = SystemParams::new(2.0, 2.0, 0.3)?;
    let m = FactoredChannel::build(10, &p)?.to_dense()?;
    let header = ContainerHeader::new(100, 100, "row-vectorised N x N operators", serde_json::to_value(p)?);
    let path = std::env::temp_dir().join("channel_n10.bin");
    write_operator(&path, &header, &m.matrix)?;
    let (back_header, back) = read_operator(&path)?;
    println!("{} bytes, convention {}", std::fs::metadata(&path)?.len(), back_header.convention);
    println!("round-trip difference {:.1e}", max_abs_diff(&m.matrix, &back));
    Ok(())
}
