use htcorr::tables::{run_table, TableId, REFERENCE_VERSION, TOLERANCE};
use htcorr::IntegrationConfig;
use std::collections::HashSet;

#[test]
fn every_table_reproduces_its_reference() {
    let cfg = IntegrationConfig::default();
    let sizes = [100, 96, 24, 28, 25];
    for (id, size) in TableId::ALL.into_iter().zip(sizes) {
        let r = run_table(id, &cfg).unwrap();
        assert_eq!(r.table, id);
        assert_eq!(r.version, REFERENCE_VERSION);
        assert_eq!(r.tolerance, TOLERANCE);
        assert_eq!(r.cells.len(), size, "{id}");
        assert_eq!(r.failures(), 0, "{id}");
        assert_eq!(r.breaches(), 0, "{id}");
        let labels: HashSet<_> = r.cells.iter().map(|c| (c.row.clone(), c.column.clone())).collect();
        assert_eq!(labels.len(), size, "{id} has duplicate cell labels");
    }
}

#[test]
fn reruns_are_identical() {
    let cfg = IntegrationConfig::default();
    assert_eq!(
        run_table(TableId::Symmetric, &cfg).unwrap(),
        run_table(TableId::Symmetric, &cfg).unwrap()
    );
}

#[test]
fn names_round_trip() {
    for id in TableId::ALL {
        assert_eq!(id.as_str().parse::<TableId>().unwrap(), id);
    }
    assert!("table-9".parse::<TableId>().is_err());
}
