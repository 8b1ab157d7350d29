use serde_json::{json, Map, Value};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Pass,
    Fail,
    Undecided,
}

impl Status {
    fn as_str(self) -> &'static str {
        match self {
            Status::Pass => "pass",
            Status::Fail => "fail",
            Status::Undecided => "undecided",
        }
    }
}

/// One command report. Fail and undecided reports always carry a reason.
#[derive(Debug, Clone)]
pub struct Verdict {
    pub op: &'static str,
    pub status: Status,
    pub reason: Option<String>,
    pub witness: Option<Value>,
    pub detail: Map<String, Value>,
}

impl Verdict {
    pub fn pass(op: &'static str) -> Self {
        Verdict {
            op,
            status: Status::Pass,
            reason: None,
            witness: None,
            detail: Map::new(),
        }
    }

    pub fn fail(op: &'static str, reason: impl Into<String>) -> Self {
        Verdict {
            status: Status::Fail,
            reason: Some(reason.into()),
            ..Verdict::pass(op)
        }
    }

    pub fn undecided(op: &'static str, reason: impl Into<String>) -> Self {
        Verdict {
            status: Status::Undecided,
            reason: Some(reason.into()),
            ..Verdict::pass(op)
        }
    }

    pub fn with_witness(mut self, witness: Value) -> Self {
        self.witness = Some(witness);
        self
    }

    pub fn with(mut self, key: &str, value: Value) -> Self {
        self.detail.insert(key.to_string(), value);
        self
    }

    pub fn to_json(&self) -> Value {
        let mut out = Map::new();
        out.insert("op".into(), json!(self.op));
        out.insert("verdict".into(), json!(self.status.as_str()));
        if let Some(r) = &self.reason {
            out.insert("reason".into(), json!(r));
        }
        if let Some(w) = &self.witness {
            out.insert("witness".into(), w.clone());
        }
        for (k, v) in &self.detail {
            out.insert(k.clone(), v.clone());
        }
        Value::Object(out)
    }

    /// 0 for pass, 1 for fail. Undecided maps to 0 unless `strict`.
    pub fn exit_code(&self, strict: bool) -> i32 {
        match self.status {
            Status::Pass => 0,
            Status::Fail => 1,
            Status::Undecided => i32::from(strict),
        }
    }
}
