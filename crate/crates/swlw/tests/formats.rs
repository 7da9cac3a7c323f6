use std::io::Cursor;

use swlw::config::parse_config;
use swlw::output::{CsvSink, HEADER};
use swlw::scenario::{build, RandomSpec, Scenario};
use swlw::snapshot;
use swlw_core::stepper::{advance, Physics, SimState, StepConfig};

fn stepped_state() -> SimState {
    let s = build(&Scenario::SmoothRandom(RandomSpec::default()), 16).unwrap().primary;
    let cfg = StepConfig {
        dt: 2e-3,
        ..Default::default()
    };
    advance(&s, &Physics::default(), &cfg).unwrap().0
}

fn bits(v: &[f64]) -> Vec<u64> {
    v.iter().map(|x| x.to_bits()).collect()
}

#[test]
fn snapshot_round_trip_is_bit_exact() {
    let s = stepped_state();
    let mut buf = Vec::new();
    snapshot::write(&mut buf, &s, 1).unwrap();
    let (h, r) = snapshot::read(Cursor::new(&buf)).unwrap();
    assert_eq!(h.step, 1);
    assert_eq!(r.t.to_bits(), s.t.to_bits());
    assert_eq!(bits(&r.rho.values), bits(&s.rho.values));
    for i in 0..2 {
        assert_eq!(bits(&r.u.0[i].values), bits(&s.u.0[i].values));
        assert_eq!(bits(&r.h.0[i].values), bits(&s.h.0[i].values));
        assert_eq!(bits(&r.map.displacement.0[i].values), bits(&s.map.displacement.0[i].values));
        for j in 0..2 {
            assert_eq!(bits(&r.map.deformation[i][j].values), bits(&s.map.deformation[i][j].values));
        }
    }
    let psi = |x: &SimState| x.psi.values.iter().flat_map(|z| [z.re.to_bits(), z.im.to_bits()]).collect::<Vec<_>>();
    assert_eq!(psi(&r), psi(&s));
    assert_eq!(bits(&r.map.jacobian.values), bits(&s.map.jacobian.values));
    assert_eq!(bits(&r.map.liouville), bits(&s.map.liouville));
    assert_eq!(r.map.particles, s.map.particles);
    assert_eq!(r.map.inverse_deformation, s.map.inverse_deformation);
    assert_eq!(bits(&r.rho0.values), bits(&s.rho0.values));
    // Writing the read state again yields identical bytes.
    let mut again = Vec::new();
    snapshot::write(&mut again, &r, 1).unwrap();
    assert_eq!(again, buf);
}

#[test]
fn snapshot_header_is_one_json_line() {
    let s = stepped_state();
    let mut buf = Vec::new();
    snapshot::write(&mut buf, &s, 7).unwrap();
    let nl = buf.iter().position(|&b| b == b'\n').unwrap();
    let v: serde_json::Value = serde_json::from_slice(&buf[..nl]).unwrap();
    assert_eq!(v["endianness"], "little");
    assert_eq!(v["n"], 16);
    assert_eq!(v["payload_bytes"].as_u64().unwrap() as usize, buf.len() - nl - 1);
    let rho = v["fields"].as_array().unwrap().iter().find(|f| f["name"] == "rho").unwrap();
    let off = nl + 1 + rho["offset"].as_u64().unwrap() as usize;
    let first = f64::from_le_bytes(buf[off..off + 8].try_into().unwrap());
    assert_eq!(first.to_bits(), s.rho.values[0].to_bits());
}

#[test]
fn snapshot_rejects_damage() {
    let s = stepped_state();
    let mut buf = Vec::new();
    snapshot::write(&mut buf, &s, 0).unwrap();
    let mut long = buf.clone();
    long.push(0);
    assert!(snapshot::read(Cursor::new(&long)).is_err());
    assert!(snapshot::read(Cursor::new(&buf[..buf.len() - 8])).is_err());
    let text = String::from_utf8_lossy(&buf).replacen("little", "big", 1);
    let nl = text.find('\n').unwrap();
    let mut bad = text[..nl].as_bytes().to_vec();
    bad.extend_from_slice(&buf[buf.iter().position(|&b| b == b'\n').unwrap()..]);
    assert!(snapshot::read(Cursor::new(&bad)).is_err());
}

#[test]
fn csv_floats_round_trip() {
    let physics = Physics::default();
    let s0 = build(&Scenario::SmoothRandom(RandomSpec::default()), 16).unwrap().primary;
    let s1 = stepped_state();
    let mut sink = CsvSink::new(Vec::new(), physics);
    let r0 = sink.push(0, &s0, None).unwrap();
    let r1 = sink.push(1, &s1, None).unwrap();
    let bytes = sink.into_inner().unwrap();
    let mut reader = csv::Reader::from_reader(bytes.as_slice());
    assert_eq!(reader.headers().unwrap().iter().collect::<Vec<_>>(), HEADER);
    let records: Vec<csv::StringRecord> = reader.records().map(Result::unwrap).collect();
    for (rec, row) in records.iter().zip([r0, r1]) {
        let energy: f64 = rec[2].parse().unwrap();
        assert_eq!(energy.to_bits(), row.energy.to_bits());
        assert_eq!(rec[2], format!("{}", row.energy));
        let t: f64 = rec[1].parse().unwrap();
        assert_eq!(t.to_bits(), row.t.to_bits());
        let mass: f64 = rec[11].parse().unwrap();
        assert_eq!(mass.to_bits(), row.mass_rho.to_bits());
    }
}

#[test]
fn echoed_config_parses_to_the_same_run() {
    let p = parse_config("[grid]\nn = 32\n[time]\ndt = 1.5e-3\n[scenario]\nname = shear\nvelocity = 0.7\n").unwrap();
    let again = parse_config(&p.config.to_ini()).unwrap();
    assert_eq!(again.config.to_ini(), p.config.to_ini());
    assert_eq!(again.config.n, 32);
    assert_eq!(again.config.step.dt, 1.5e-3);
}
