use std::fmt;
use std::str::FromStr;

use crate::calendar::Demeaner;
use crate::error::EpfError;
use crate::estimation::InfoCriterion;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ExpertOptions {
    /// Weekday terms for all seven days instead of Monday, Saturday, Sunday.
    pub dow_full: bool,
    pub periodic: bool,
    pub nonlinear: bool,
    /// Demean by the hour-of-day mean and drop the intercept.
    pub star: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LassoOptions {
    pub periodic: bool,
    pub nonlinear: bool,
    pub ic: InfoCriterion,
}

/// Declarative description of one forecasting model.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ModelSpec {
    MeanHoW,
    Naive,
    Expert(ExpertOptions),
    Ar24(Demeaner),
    Var(Demeaner),
    Lasso24(LassoOptions),
    ArUni(Demeaner),
    LassoUni(LassoOptions),
}

/// Model class, numbered 1..=8 in the order of [`ModelSpec::all`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ModelClass {
    Mean,
    SimilarDay,
    Expert,
    Ar24,
    Var,
    Lasso24,
    ArUni,
    LassoUni,
}

impl ModelClass {
    pub fn number(self) -> usize {
        self as usize + 1
    }
}

const PN_ORDER_24: [(bool, bool); 4] = [(true, true), (false, true), (true, false), (false, false)];
const PN_ORDER_UNI: [(bool, bool); 4] = [(true, true), (true, false), (false, true), (false, false)];

impl ModelSpec {
    /// The complete registry, grouped by class.
    pub fn all() -> Vec<ModelSpec> {
        let mut out = vec![ModelSpec::MeanHoW, ModelSpec::Naive];
        for star in [false, true] {
            for dow_full in [true, false] {
                for (periodic, nonlinear) in PN_ORDER_24 {
                    out.push(ModelSpec::Expert(ExpertOptions { dow_full, periodic, nonlinear, star }));
                }
            }
        }
        out.extend([Demeaner::HoW, Demeaner::HoD].map(ModelSpec::Ar24));
        out.extend([Demeaner::HoW, Demeaner::HoD].map(ModelSpec::Var));
        for (periodic, nonlinear) in PN_ORDER_24 {
            for ic in InfoCriterion::ALL {
                out.push(ModelSpec::Lasso24(LassoOptions { periodic, nonlinear, ic }));
            }
        }
        out.extend([Demeaner::Overall, Demeaner::DoW, Demeaner::HoD, Demeaner::HoW].map(ModelSpec::ArUni));
        for (periodic, nonlinear) in PN_ORDER_UNI {
            for ic in InfoCriterion::ALL {
                out.push(ModelSpec::LassoUni(LassoOptions { periodic, nonlinear, ic }));
            }
        }
        out
    }

    pub fn class(&self) -> ModelClass {
        match self {
            ModelSpec::MeanHoW => ModelClass::Mean,
            ModelSpec::Naive => ModelClass::SimilarDay,
            ModelSpec::Expert(_) => ModelClass::Expert,
            ModelSpec::Ar24(_) => ModelClass::Ar24,
            ModelSpec::Var(_) => ModelClass::Var,
            ModelSpec::Lasso24(_) => ModelClass::Lasso24,
            ModelSpec::ArUni(_) => ModelClass::ArUni,
            ModelSpec::LassoUni(_) => ModelClass::LassoUni,
        }
    }

    pub fn is_lasso(&self) -> bool {
        matches!(self, ModelSpec::Lasso24(_) | ModelSpec::LassoUni(_))
    }

    /// True for models forecasting all 24 hours at once from realized lags.
    pub fn is_multivariate(&self) -> bool {
        !matches!(self, ModelSpec::ArUni(_) | ModelSpec::LassoUni(_))
    }

    pub fn id(&self) -> String {
        fn flags(parts: &[(bool, &str)]) -> String {
            parts.iter().filter(|(on, _)| *on).map(|(_, s)| format!("_{s}")).collect()
        }
        match *self {
            ModelSpec::MeanHoW => "mean_HoW".into(),
            ModelSpec::Naive => "naive".into(),
            ModelSpec::Expert(o) => format!(
                "expert{}",
                flags(&[(o.dow_full, "DoW"), (o.periodic, "p"), (o.nonlinear, "nl"), (o.star, "star")])
            ),
            ModelSpec::Ar24(d) => format!("24AR_{}", d.label()),
            ModelSpec::Var(d) => format!("VAR_{}", d.label()),
            ModelSpec::Lasso24(o) => {
                format!("24lasso_DoW{}_{}", flags(&[(o.periodic, "p"), (o.nonlinear, "nl")]), o.ic.label())
            }
            ModelSpec::ArUni(Demeaner::Overall) => "AR".into(),
            ModelSpec::ArUni(d) => format!("AR_{}", d.label()),
            ModelSpec::LassoUni(o) => {
                format!("lasso_HoW{}_{}", flags(&[(o.periodic, "p"), (o.nonlinear, "nl")]), o.ic.label())
            }
        }
    }

    /// Parses a comma-separated list of ids; `all` expands to the registry.
    pub fn parse_list(list: &str) -> Result<Vec<ModelSpec>, EpfError> {
        let mut out: Vec<ModelSpec> = Vec::new();
        for item in list.split(',').map(str::trim).filter(|s| !s.is_empty()) {
            if item == "all" {
                for s in ModelSpec::all() {
                    if !out.contains(&s) {
                        out.push(s);
                    }
                }
            } else {
                let s: ModelSpec = item.parse()?;
                if !out.contains(&s) {
                    out.push(s);
                }
            }
        }
        if out.is_empty() {
            return Err(EpfError::InvalidArgument("empty model list".into()));
        }
        Ok(out)
    }
}

impl fmt::Display for ModelSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.id())
    }
}

impl FromStr for ModelSpec {
    type Err = EpfError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        ModelSpec::all()
            .into_iter()
            .find(|m| m.id() == s)
            .ok_or_else(|| EpfError::UnknownModel(s.to_string()))
    }
}
