use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::Json;
use serde::Serialize;
use starstar_core::{FilterError, IngestError, ModelError, ProjectionError};

/// An error answered as `{"code": ..., "message": ...}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ApiError {
    pub status: StatusCode,
    pub code: &'static str,
    pub message: String,
}

#[derive(Serialize)]
struct Body<'a> {
    code: &'a str,
    message: &'a str,
}

impl ApiError {
    pub fn new(status: StatusCode, code: &'static str, message: impl Into<String>) -> Self {
        Self {
            status,
            code,
            message: message.into(),
        }
    }

    pub fn not_found(what: impl Into<String>) -> Self {
        let what = what.into();
        Self::new(StatusCode::NOT_FOUND, "notFound", format!("unknown {what}"))
    }

    pub fn bad_request(code: &'static str, message: impl Into<String>) -> Self {
        Self::new(StatusCode::BAD_REQUEST, code, message)
    }

    pub fn unprocessable(code: &'static str, message: impl Into<String>) -> Self {
        Self::new(StatusCode::UNPROCESSABLE_ENTITY, code, message)
    }

    pub fn internal(message: impl Into<String>) -> Self {
        Self::new(StatusCode::INTERNAL_SERVER_ERROR, "internal", message)
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        let body = Body {
            code: self.code,
            message: &self.message,
        };
        (self.status, Json(body)).into_response()
    }
}

impl From<IngestError> for ApiError {
    fn from(e: IngestError) -> Self {
        let message = e.to_string();
        match e {
            IngestError::Parse { .. } => Self::bad_request("parseError", message),
            IngestError::Schema { .. } => Self::bad_request("schemaError", message),
            IngestError::DuplicateId { .. } => Self::unprocessable("duplicateId", message),
            IngestError::DanglingRef { .. } => Self::unprocessable("danglingRef", message),
        }
    }
}

impl From<FilterError> for ApiError {
    fn from(e: FilterError) -> Self {
        match e {
            FilterError::NotFound(what) => Self::not_found(what),
            FilterError::Invalid(message) => Self::bad_request("invalidFilter", message),
        }
    }
}

impl From<ProjectionError> for ApiError {
    fn from(e: ProjectionError) -> Self {
        let message = e.to_string();
        match e {
            ProjectionError::InvalidParams(_) => Self::bad_request("invalidParams", message),
            ProjectionError::EmptyPerspective(_) => Self::unprocessable("emptyPerspective", message),
            ProjectionError::Cancelled => Self::unprocessable("timeout", message),
            ProjectionError::Undefined => Self::unprocessable("undefined", message),
            ProjectionError::DanglingRef { .. } => Self::unprocessable("danglingRef", message),
        }
    }
}

impl From<ModelError> for ApiError {
    fn from(e: ModelError) -> Self {
        match e {
            ModelError::NotFound(what) => Self::not_found(what),
            other => Self::unprocessable("invalidModel", other.to_string()),
        }
    }
}
