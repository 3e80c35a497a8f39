//! Domain specs as JSON: `{"type": "unit_disc" | "disc" | "annulus" | "sublevel" | "punctured", ...}`,
//! complex numbers as `[re, im]`.

use serde_json::{json, Map, Value};
use suita_core::{Complex64, DomainSpec};

fn point(v: &Value, field: &str) -> Result<Complex64, String> {
    match v.as_array().map(|a| a.as_slice()) {
        Some([re, im]) => match (re.as_f64(), im.as_f64()) {
            (Some(re), Some(im)) => Ok(Complex64::new(re, im)),
            _ => Err(format!("field `{field}` must hold two numbers")),
        },
        _ => Err(format!("field `{field}` must be [re, im]")),
    }
}

fn field<'a>(obj: &'a Map<String, Value>, name: &str) -> Result<&'a Value, String> {
    obj.get(name).ok_or_else(|| format!("missing field `{name}`"))
}

fn number(obj: &Map<String, Value>, name: &str) -> Result<f64, String> {
    field(obj, name)?.as_f64().ok_or_else(|| format!("field `{name}` must be a number"))
}

fn check_fields(obj: &Map<String, Value>, allowed: &[&str]) -> Result<(), String> {
    for k in obj.keys() {
        if k != "type" && !allowed.contains(&k.as_str()) {
            return Err(format!("unknown field `{k}`"));
        }
    }
    Ok(())
}

/// Parses without validating domain invariants.
pub fn from_value(v: &Value) -> Result<DomainSpec, String> {
    let obj = v.as_object().ok_or("domain must be a JSON object")?;
    let ty = field(obj, "type")?.as_str().ok_or("field `type` must be a string")?;
    Ok(match ty {
        "unit_disc" => {
            check_fields(obj, &[])?;
            DomainSpec::UnitDisc
        }
        "disc" => {
            check_fields(obj, &["center", "radius"])?;
            DomainSpec::Disc { center: point(field(obj, "center")?, "center")?, radius: number(obj, "radius")? }
        }
        "annulus" => {
            check_fields(obj, &["q"])?;
            DomainSpec::Annulus { q: number(obj, "q")? }
        }
        "sublevel" => {
            check_fields(obj, &["base", "pole", "level"])?;
            DomainSpec::Sublevel {
                base: Box::new(from_value(field(obj, "base")?)?),
                pole: point(field(obj, "pole")?, "pole")?,
                level: number(obj, "level")?,
            }
        }
        "punctured" => {
            check_fields(obj, &["base", "punctures", "excision_radius"])?;
            let pts = field(obj, "punctures")?.as_array().ok_or("field `punctures` must be a list")?;
            DomainSpec::Punctured {
                base: Box::new(from_value(field(obj, "base")?)?),
                punctures: pts.iter().map(|p| point(p, "punctures")).collect::<Result<_, _>>()?,
                excision_radius: number(obj, "excision_radius")?,
            }
        }
        other => return Err(format!("unknown domain type `{other}`")),
    })
}

pub fn parse(text: &str) -> Result<DomainSpec, String> {
    let v: Value = serde_json::from_str(text).map_err(|e| format!("domain JSON: {e}"))?;
    from_value(&v)
}

pub fn pair(z: Complex64) -> Value {
    json!([z.re, z.im])
}

pub fn to_value(d: &DomainSpec) -> Value {
    match d {
        DomainSpec::UnitDisc => json!({"type": "unit_disc"}),
        DomainSpec::Disc { center, radius } => json!({"type": "disc", "center": pair(*center), "radius": radius}),
        DomainSpec::Annulus { q } => json!({"type": "annulus", "q": q}),
        DomainSpec::Sublevel { base, pole, level } => {
            json!({"type": "sublevel", "base": to_value(base), "pole": pair(*pole), "level": level})
        }
        DomainSpec::Punctured { base, punctures, excision_radius } => json!({
            "type": "punctured",
            "base": to_value(base),
            "punctures": punctures.iter().map(|p| pair(*p)).collect::<Vec<_>>(),
            "excision_radius": excision_radius,
        }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip() {
        let text = r#"{"type":"punctured","base":{"type":"sublevel","base":{"type":"annulus","q":0.25},"pole":[0.5,0],"level":-1},"punctures":[[0.45,0.01]],"excision_radius":0.001}"#;
        let d = parse(text).unwrap();
        assert_eq!(parse(&to_value(&d).to_string()).unwrap(), d);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(parse(r#"{"type":"square"}"#).is_err());
        assert!(parse(r#"{"type":"disc","center":[0],"radius":1}"#).is_err());
        assert!(parse(r#"{"type":"annulus","q":0.2,"extra":1}"#).is_err());
        assert!(parse(r#"{"type":"annulus"}"#).is_err());
        assert!(parse("[1,2]").is_err());
    }
}
