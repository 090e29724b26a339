//! Validates a URDF, then prints the tip pose, geometric Jacobian and
//! manipulability of a chain at a joint configuration.
//!
//!     cargo run --example kinematics_query -- [urdf] [base,tip] [q1,q2,...]

use kinesim::assets::RobotAsset;
use kinesim::kinematics::{chain_fk, geometric_jacobian, manipulability, JacobianMode};
use kinesim::urdf::{parse_urdf, validate_model};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1);
    let text = match args.next() {
        Some(path) => std::fs::read_to_string(path)?,
        None => RobotAsset::bundled_urdf("planar_2r").unwrap().to_string(),
    };
    let chain_arg = args.next().unwrap_or_else(|| "base,tip".into());
    let q: Vec<f64> = match args.next() {
        Some(s) => s.split(',').map(str::parse).collect::<Result<_, _>>()?,
        None => vec![0.3, 1.2],
    };

    let model = parse_urdf(&text)?;
    let report = validate_model(&model);
    println!("validation: {} finding(s), errors: {}", report.findings.len(), report.has_errors());
    for f in &report.findings {
        println!("  {:?} {}: {}", f.severity, f.element, f.message);
    }

    let (base, tip) = chain_arg.split_once(',').ok_or("chain must be `base,tip`")?;
    let chain = model.extract_chain(base, tip)?;
    println!("chain {base} -> {tip}: joints {:?}", chain.joint_names());
    let pose = chain_fk(&chain, &q)?;
    println!("tip translation {:?}, rpy {:?}", pose.xyz(), pose.rpy());

    let jac = geometric_jacobian(&chain, &q, JacobianMode::Full6)?;
    println!("jacobian (rows vx vy vz wx wy wz):{:.4}", jac.matrix);
    for mode in [JacobianMode::Full6, JacobianMode::Position3] {
        println!("manipulability {mode}: {:.6}", manipulability(&chain, &q, mode)?);
    }
    Ok(())
}
