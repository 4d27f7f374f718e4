use super::report::MetricReport;
use super::violations::ViolationReport;
use super::MetricsError;

fn mean(values: impl Iterator<Item = f64>) -> Option<f64> {
    let mut sum = 0.0;
    let mut count = 0usize;
    for v in values {
        sum += v;
        count += 1;
    }
    (count > 0).then(|| sum / count as f64)
}

/// Field-wise arithmetic mean over reports; optional fields skip absent
/// values rather than treating them as zero. Provenance is carried from
/// the first report.
pub fn aggregate(reports: &[MetricReport]) -> Result<MetricReport, MetricsError> {
    if reports.is_empty() {
        return Err(MetricsError::EmptyAggregate);
    }
    Ok(MetricReport {
        validity: mean(reports.iter().map(|r| r.validity)).expect("nonempty"),
        overlap: mean(reports.iter().map(|r| r.overlap)).expect("nonempty"),
        alignment: mean(reports.iter().map(|r| r.alignment)).expect("nonempty"),
        underlay_loose: mean(reports.iter().filter_map(|r| r.underlay_loose)),
        underlay_strict: mean(reports.iter().filter_map(|r| r.underlay_strict)),
        utility: mean(reports.iter().filter_map(|r| r.utility)),
        occlusion: mean(reports.iter().filter_map(|r| r.occlusion)),
        unreadability: mean(reports.iter().filter_map(|r| r.unreadability)),
        provenance: reports[0].provenance.clone(),
    })
}

/// Fraction of layouts with any violation, as a percentage.
pub fn violation_rate(reports: &[ViolationReport]) -> f64 {
    if reports.is_empty() {
        return 0.0;
    }
    let violating = reports.iter().filter(|r| r.has_violation).count();
    100.0 * violating as f64 / reports.len() as f64
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metrics::report::{Provenance, UtilityDenominator};

    fn report(validity: f64, underlay_loose: Option<f64>) -> MetricReport {
        MetricReport {
            validity,
            overlap: 0.0,
            alignment: 0.0,
            underlay_loose,
            underlay_strict: None,
            utility: None,
            occlusion: None,
            unreadability: None,
            provenance: Provenance {
                saliency_source: None,
                theta: 0.5,
                min_area_ratio: "1/1000".into(),
                utility_denominator: UtilityDenominator::default(),
            },
        }
    }

    #[test]
    fn single_report_aggregates_to_itself() {
        let r = report(0.75, Some(0.5));
        let agg = aggregate(std::slice::from_ref(&r)).unwrap();
        assert_eq!(agg, r);
    }

    #[test]
    fn absent_fields_are_skipped_not_zeroed() {
        let reports = [report(1.0, Some(0.8)), report(1.0, None)];
        let agg = aggregate(&reports).unwrap();
        assert_eq!(agg.underlay_loose, Some(0.8));
        assert_eq!(agg.underlay_strict, None);
    }

    #[test]
    fn validity_mean() {
        let reports = [report(1.0, None), report(0.5, None), report(0.0, None)];
        assert_eq!(aggregate(&reports).unwrap().validity, 0.5);
    }

    #[test]
    fn empty_list_errors() {
        assert!(matches!(aggregate(&[]), Err(MetricsError::EmptyAggregate)));
    }

    #[test]
    fn violation_percentage() {
        let v = |has: bool| ViolationReport {
            constraint_mismatch: has,
            orphan_underlays: vec![],
            has_violation: has,
        };
        assert_eq!(violation_rate(&[v(true), v(false), v(false), v(false)]), 25.0);
        assert_eq!(violation_rate(&[]), 0.0);
    }
}
