//! Prepend-K conditioning: prefix predicted labels to an utterance.

/// `label + " " + utterance`.
pub fn prepend_label(utterance: &str, label: &str) -> String {
    let mut out = String::with_capacity(label.len() + 1 + utterance.len());
    out.push_str(label);
    out.push(' ');
    out.push_str(utterance);
    out
}

/// Prefixes labels in the given order, so `[a, b]` yields `"a b utterance"`.
pub fn prepend_labels<S: AsRef<str>>(utterance: &str, labels: &[S]) -> String {
    labels
        .iter()
        .rev()
        .fold(utterance.to_string(), |acc, l| prepend_label(&acc, l.as_ref()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_label() {
        assert_eq!(prepend_label("I finally got promoted!", "proud"), "proud I finally got promoted!");
        assert_eq!(prepend_label("", "proud"), "proud ");
    }

    #[test]
    fn top_k() {
        assert_eq!(prepend_labels("utterance", &["a", "b"]), "a b utterance");
        assert_eq!(prepend_labels::<&str>("u", &[]), "u");
    }
}
