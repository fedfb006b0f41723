//! Signal detection and the other analysis primitives on hand-made inputs.

use sonoscape::analysis::{agreement, anova_oneway, classify_trial, d_prime, probit, rates};
use sonoscape::records::{Action, Answer};

fn main() -> anyhow::Result<()> {
    for p in [0.01, 0.5, 0.84, 0.99] {
        println!("probit({p}) = {:.6}", probit(p)?);
    }
    println!("d'(0.99, 0.01) = {:.4}", d_prime(0.99, 0.01)?);

    // Checked before the onset: a prediction, scored as a false alarm.
    let early = classify_trial(Some(10.0), &[(8.0, Action::Check)]);
    // Checked, unchecked, checked again: the last stretch counts.
    let changed = classify_trial(Some(10.0), &[(10.5, Action::Check), (11.0, Action::Uncheck), (12.0, Action::Check)]);
    println!("prediction: {:?}\nchange of mind: {:?}", early.outcome, changed);

    let quiet = classify_trial(None, &[]);
    // Rates need at least one trial with and one without an anomaly.
    if let Some(r) = rates(&[early, changed, quiet]) {
        println!("H {:.2}, FA {:.2}, d' {:.3}", r.h, r.fa, r.d_prime());
    }

    let a = anova_oneway(&[&[1.0, 2.0, 3.0, 4.0], &[2.0, 3.0, 4.0, 5.0]])?;
    println!("F({}, {}) = {:.3}, p = {:.4}", a.df_between, a.df_within, a.f, a.p);
    let pct = agreement(&[Answer::Somewhat, Answer::Somewhat, Answer::Somewhat, Answer::Agree]);
    println!("agreement {:.2}%", pct.unwrap_or(f64::NAN));
    Ok(())
}
