//! Move an arbitrary qubit from one end of the chain to the other.
use adiabus::anneal::{transport_qubit, TransportConfig, TransportSetup};
use adiabus::model::{simultaneous_protocol, simultaneous_protocol_with, BlochVector, Coupling};

fn main() -> adiabus::Result<()> {
    let p = simultaneous_protocol(7, 1.0, 0.2)?;
    let cfg = TransportConfig { sector_fidelities: true, ..TransportConfig::default() };
    let setup = TransportSetup::new(&p, &cfg)?;
    println!("input site {}, readout {:?}", setup.input_site(), setup.readout());
    for b in BlochVector::cardinal() {
        let r = setup.run(&b, 100.0)?;
        let o = r.bloch_out;
        println!(
            "in ({:+.0},{:+.0},{:+.0})  out ({:+.4},{:+.4},{:+.4})  fidelity {:.6}",
            b.x, b.y, b.z, o.x, o.y, o.z, r.qubit_fidelity
        );
    }

    // A diagonal Hamiltonian cannot move a superposition.
    let ising = simultaneous_protocol_with(7, Coupling::ising(1.0), Coupling::ising(0.2))?;
    let plus = BlochVector::new(1.0, 0.0, 0.0)?;
    let r = transport_qubit(&ising, &plus, 100.0, &TransportConfig::default())?;
    println!("Ising chain, |+> input: fidelity {:.6}", r.qubit_fidelity);
    Ok(())
}
