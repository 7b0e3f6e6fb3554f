use crate::error::{Error, Result};
use crate::model::ValueModel;
use crate::value::ValueVector;

/// Anything that maps text to a value vector.
pub trait ValueFunction: Send + Sync {
    fn value_vector(&self, text: &str) -> Result<ValueVector>;

    /// Scores several texts; result order matches input order.
    fn value_vectors(&self, texts: &[String]) -> Result<Vec<ValueVector>> {
        texts.iter().map(|t| self.value_vector(t)).collect()
    }
}

impl ValueFunction for ValueModel {
    fn value_vector(&self, text: &str) -> Result<ValueVector> {
        Ok(self.predict_vector(text))
    }
}

impl<T: ValueFunction + ?Sized> ValueFunction for &T {
    fn value_vector(&self, text: &str) -> Result<ValueVector> {
        (**self).value_vector(text)
    }

    fn value_vectors(&self, texts: &[String]) -> Result<Vec<ValueVector>> {
        (**self).value_vectors(texts)
    }
}

/// Adapts a closure.
pub struct FnValue<F>(pub F);

impl<F> ValueFunction for FnValue<F>
where
    F: Fn(&str) -> Result<ValueVector> + Send + Sync,
{
    fn value_vector(&self, text: &str) -> Result<ValueVector> {
        (self.0)(text)
    }
}

/// Attaches the offending text to a scoring failure.
pub(crate) fn score_all(value_fn: &dyn ValueFunction, texts: &[String]) -> Result<Vec<ValueVector>> {
    match value_fn.value_vectors(texts) {
        Ok(v) if v.len() == texts.len() => Ok(v),
        Ok(v) => Err(Error::ValueFn {
            text: String::new(),
            message: format!("value function returned {} vectors for {} texts", v.len(), texts.len()),
        }),
        Err(e @ Error::ValueFn { .. }) => Err(e),
        Err(batch_err) => {
            // Re-score one at a time to find the text that fails.
            for t in texts {
                if let Err(e) = value_fn.value_vector(t) {
                    return Err(wrap(t, e));
                }
            }
            Err(Error::ValueFn {
                text: String::new(),
                message: batch_err.to_string(),
            })
        }
    }
}

fn wrap(text: &str, e: Error) -> Error {
    match e {
        Error::ValueFn { .. } => e,
        other => Error::ValueFn {
            text: text.to_string(),
            message: other.to_string(),
        },
    }
}
