use std::fmt;

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use serde_json::{json, Value as Json};

use super::value::Value;

/// A finite prefix of a value.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Observation {
    Con(String, Vec<Observation>),
    Bot,
    Fun,
    Dummy,
    /// A constructor below the observation depth.
    Cut,
}

/// Observes constructors down to `depth` levels of nesting; nullary
/// constructors are always shown.
pub fn observe(v: &Value, depth: usize) -> Observation {
    match v {
        Value::Bot => Observation::Bot,
        Value::Dummy => Observation::Dummy,
        Value::Fun(_) | Value::ConstFun(_) => Observation::Fun,
        Value::Constr(co, args) if args.is_empty() => Observation::Con(co.to_string(), vec![]),
        Value::Constr(_, _) if depth == 0 => Observation::Cut,
        Value::Constr(co, args) => {
            Observation::Con(co.to_string(), args.iter().map(|a| observe(a, depth - 1)).collect())
        }
    }
}

/// The information order on observations of equal depth.
pub fn obs_leq(a: &Observation, b: &Observation) -> bool {
    match (a, b) {
        (Observation::Bot, _) | (Observation::Cut, _) => true,
        (Observation::Fun, Observation::Fun) | (Observation::Dummy, Observation::Dummy) => true,
        (Observation::Con(c, xs), Observation::Con(d, ys)) => {
            c == d && xs.len() == ys.len() && xs.iter().zip(ys).all(|(x, y)| obs_leq(x, y))
        }
        _ => false,
    }
}

impl Observation {
    pub fn is_bot(&self) -> bool {
        matches!(self, Observation::Bot)
    }

    /// True for observations built from constructors only.
    pub fn is_ground(&self) -> bool {
        match self {
            Observation::Con(_, args) => args.iter().all(Observation::is_ground),
            _ => false,
        }
    }

    pub fn as_numeral(&self) -> Option<usize> {
        match self {
            Observation::Con(c, args) if c == "0" && args.is_empty() => Some(0),
            Observation::Con(c, args) if c == "S" && args.len() == 1 => args[0].as_numeral().map(|n| n + 1),
            _ => None,
        }
    }

    fn as_list(&self) -> Option<Vec<&Observation>> {
        let mut items = Vec::new();
        let mut cur = self;
        loop {
            match cur {
                Observation::Con(c, args) if c == "nil" && args.is_empty() => return Some(items),
                Observation::Con(c, args) if c == "cons" && args.len() == 2 => {
                    items.push(&args[0]);
                    cur = &args[1];
                }
                _ => return None,
            }
        }
    }

    pub fn to_json(&self) -> Json {
        match self {
            Observation::Con(c, args) => {
                json!({"con": c, "args": args.iter().map(Observation::to_json).collect::<Vec<_>>()})
            }
            Observation::Bot => json!("bot"),
            Observation::Fun => json!("fun"),
            Observation::Dummy => json!("dummy"),
            Observation::Cut => json!("cut"),
        }
    }

    pub fn from_json(v: &Json) -> Result<Observation, String> {
        match v {
            Json::String(s) => match s.as_str() {
                "bot" => Ok(Observation::Bot),
                "fun" => Ok(Observation::Fun),
                "dummy" => Ok(Observation::Dummy),
                "cut" => Ok(Observation::Cut),
                other => Err(format!("unknown observation leaf `{other}`")),
            },
            Json::Object(map) => {
                let con = map
                    .get("con")
                    .and_then(Json::as_str)
                    .ok_or("constructor observation needs a `con` string")?;
                let args = match map.get("args") {
                    None => Vec::new(),
                    Some(Json::Array(items)) => items.iter().map(Observation::from_json).collect::<Result<_, _>>()?,
                    Some(_) => return Err("`args` must be an array".into()),
                };
                Ok(Observation::Con(con.to_string(), args))
            }
            _ => Err("an observation is a string or an object".into()),
        }
    }
}

impl Serialize for Observation {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        self.to_json().serialize(s)
    }
}

impl<'de> Deserialize<'de> for Observation {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let v = Json::deserialize(d)?;
        Observation::from_json(&v).map_err(D::Error::custom)
    }
}

impl fmt::Display for Observation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(n) = self.as_numeral() {
            return write!(f, "{n}");
        }
        if let Some(items) = self.as_list() {
            let parts: Vec<String> = items.iter().map(|o| o.to_string()).collect();
            return write!(f, "[{}]", parts.join(", "));
        }
        match self {
            Observation::Con(c, args) if args.is_empty() => f.write_str(c),
            Observation::Con(c, args) => {
                let parts: Vec<String> = args.iter().map(|o| o.to_string()).collect();
                write!(f, "{c}({})", parts.join(", "))
            }
            Observation::Bot => f.write_str("bot"),
            Observation::Fun => f.write_str("fun"),
            Observation::Dummy => f.write_str("dummy"),
            Observation::Cut => f.write_str("..."),
        }
    }
}
