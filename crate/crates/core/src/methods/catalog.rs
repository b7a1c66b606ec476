//! The insight-type catalog and the resolved method registry.

use std::collections::BTreeMap;

use serde::Serialize;

use super::params::Hyperparameters;
use super::{MethodClass, MethodKind, OutputShape};
use crate::config::{ConfigError, MethodOverrides};
use crate::dataset::AttributeType::{self, C, N, T};

/// One attribute-type signature of an insight type and the methods run on it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Binding {
    pub signature: &'static [AttributeType],
    pub methods: &'static [MethodKind],
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct InsightType {
    pub id: &'static str,
    pub display_name: &'static str,
    pub bindings: &'static [Binding],
}

impl InsightType {
    pub fn signatures(&self) -> impl Iterator<Item = &'static [AttributeType]> {
        self.bindings.iter().map(|b| b.signature)
    }

    /// Index of `signature` among this type's bindings.
    pub fn signature_index(&self, signature: &[AttributeType]) -> Option<usize> {
        self.bindings.iter().position(|b| b.signature == signature)
    }
}

use MethodKind::*;

static CATALOG: &[InsightType] = &[
    InsightType {
        id: "single_variable_outliers",
        display_name: "Single-variable outliers",
        bindings: &[Binding {
            signature: &[N],
            methods: &[Iqr, Zscore],
        }],
    },
    InsightType {
        id: "two_variable_outliers",
        display_name: "Two-variable outliers",
        bindings: &[
            Binding {
                signature: &[N, N],
                methods: &[Dbscan, IsolationForest],
            },
            Binding {
                signature: &[C, C],
                methods: &[ChisqResidual],
            },
        ],
    },
    InsightType {
        id: "multivariate_outliers",
        display_name: "Multivariate outliers",
        bindings: &[Binding {
            signature: &[N, N, N],
            methods: &[IsolationForest, Mahalanobis, KmeansDistance, KernelMeanDistance],
        }],
    },
    InsightType {
        id: "time_series_outliers",
        display_name: "Time-series outliers",
        bindings: &[
            Binding {
                signature: &[T, N],
                methods: &[RollingResidual],
            },
            Binding {
                signature: &[T, N, C],
                methods: &[RollingResidual],
            },
        ],
    },
    InsightType {
        id: "peaks",
        display_name: "Peaks",
        bindings: &[Binding {
            signature: &[T, N],
            methods: &[Peaks],
        }],
    },
    InsightType {
        id: "trend",
        display_name: "Trend",
        bindings: &[Binding {
            signature: &[T, N],
            methods: &[TrendOls, MannKendall],
        }],
    },
    InsightType {
        id: "seasonality",
        display_name: "Seasonality",
        bindings: &[Binding {
            signature: &[T, N],
            methods: &[Seasonality],
        }],
    },
    InsightType {
        id: "linear_correlation",
        display_name: "Linear correlation",
        bindings: &[Binding {
            signature: &[N, N],
            methods: &[Pearson],
        }],
    },
    InsightType {
        id: "nonlinear_correlation",
        display_name: "Nonlinear correlation",
        bindings: &[Binding {
            signature: &[N, N],
            methods: &[Spearman, MutualInformation],
        }],
    },
    InsightType {
        id: "categorical_association",
        display_name: "Categorical association",
        bindings: &[Binding {
            signature: &[C, C],
            methods: &[CramersV, MutualInformation],
        }],
    },
    InsightType {
        id: "group_difference",
        display_name: "Group difference",
        bindings: &[Binding {
            signature: &[C, N],
            methods: &[GroupDifference, MutualInformation],
        }],
    },
    InsightType {
        id: "skew",
        display_name: "Skew",
        bindings: &[Binding {
            signature: &[N],
            methods: &[Skewness],
        }],
    },
    InsightType {
        id: "heavy_tails",
        display_name: "Heavy tails",
        bindings: &[Binding {
            signature: &[N],
            methods: &[HeavyTail],
        }],
    },
    InsightType {
        id: "time_series_causality",
        display_name: "Time-series causality",
        bindings: &[Binding {
            signature: &[T, N, N],
            methods: &[Granger],
        }],
    },
];

/// All insight types in catalog order. Catalog order is the final tie-break
/// when ranking insight types.
pub fn catalog() -> &'static [InsightType] {
    CATALOG
}

pub fn insight_type(id: &str) -> Option<&'static InsightType> {
    CATALOG.iter().find(|t| t.id == id)
}

/// One detector bound to an insight type and signature, with resolved
/// hyperparameters.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MethodSpec {
    pub id: &'static str,
    pub insight_type: &'static str,
    pub signature: &'static [AttributeType],
    pub method_class: MethodClass,
    pub hyperparameters: Hyperparameters,
    pub output_shape: OutputShape,
    #[serde(skip)]
    pub kind: MethodKind,
}

/// Resolved hyperparameters for every method. Immutable once built.
#[derive(Debug, Clone, PartialEq)]
pub struct Registry {
    params: BTreeMap<MethodKind, Hyperparameters>,
}

impl Default for Registry {
    fn default() -> Self {
        Self::new(&MethodOverrides::new()).expect("defaults satisfy every schema")
    }
}

impl Registry {
    pub fn new(overrides: &MethodOverrides) -> Result<Self, ConfigError> {
        if let Some(unknown) = overrides.keys().find(|k| MethodKind::from_id(k).is_none()) {
            return Err(ConfigError::UnknownMethod(unknown.clone()));
        }
        let mut params = BTreeMap::new();
        for &kind in MethodKind::ALL {
            let resolved =
                Hyperparameters::resolve(kind.param_schema(), overrides.get(kind.id())).map_err(|reason| {
                    ConfigError::Hyperparameter {
                        method: kind.id().to_string(),
                        reason,
                    }
                })?;
            params.insert(kind, resolved);
        }
        Ok(Self { params })
    }

    pub fn params(&self, kind: MethodKind) -> &Hyperparameters {
        &self.params[&kind]
    }

    /// Every (insight type, signature, method) triple of the catalog.
    pub fn method_specs(&self) -> Vec<MethodSpec> {
        let mut out = Vec::new();
        for t in CATALOG {
            for b in t.bindings {
                for &kind in b.methods {
                    out.push(MethodSpec {
                        id: kind.id(),
                        insight_type: t.id,
                        signature: b.signature,
                        method_class: kind.class(),
                        hyperparameters: self.params(kind).clone(),
                        output_shape: kind.output_shape(),
                        kind,
                    });
                }
            }
        }
        out
    }
}
