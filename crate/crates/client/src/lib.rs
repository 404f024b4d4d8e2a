//! Thin async client for the twomask service. Each method is one request.

use reqwest::{Method, StatusCode};
use serde::de::DeserializeOwned;
use serde::Serialize;
use twomask_proto::*;

#[derive(Debug, thiserror::Error)]
pub enum ClientError {
    /// The service answered with an error body.
    #[error("{kind} error: {message}")]
    Api { status: u16, kind: String, message: String },
    #[error("transport: {0}")]
    Transport(#[from] reqwest::Error),
}

impl ClientError {
    /// The service's error kind, or `io` for transport failures.
    pub fn kind(&self) -> &str {
        match self {
            ClientError::Api { kind, .. } => kind,
            ClientError::Transport(_) => "io",
        }
    }
}

#[derive(Debug, Clone)]
pub struct Client {
    base: String,
    http: reqwest::Client,
}

impl Client {
    /// `base_url` like `http://127.0.0.1:8080`, without a trailing path.
    pub fn new(base_url: impl Into<String>) -> Self {
        let base = base_url.into().trim_end_matches('/').to_owned();
        Self { base, http: reqwest::Client::new() }
    }

    pub fn base_url(&self) -> &str {
        &self.base
    }

    async fn call<B: Serialize, R: DeserializeOwned>(
        &self,
        method: Method,
        path: &str,
        body: Option<&B>,
    ) -> Result<R, ClientError> {
        let mut req = self.http.request(method, format!("{}{path}", self.base));
        if let Some(b) = body {
            req = req.json(b);
        }
        let resp = req.send().await?;
        let status = resp.status();
        if status.is_success() {
            return Ok(resp.json().await?);
        }
        Err(api_error(status, resp.text().await?))
    }

    async fn post<B: Serialize, R: DeserializeOwned>(&self, path: &str, body: &B) -> Result<R, ClientError> {
        self.call(Method::POST, path, Some(body)).await
    }

    pub async fn health(&self) -> Result<HealthResponse, ClientError> {
        self.call::<(), _>(Method::GET, "/health", None).await
    }

    pub async fn simulate(&self, req: &SimulateRequest) -> Result<SimulateResponse, ClientError> {
        self.post("/v1/simulate/triplet", req).await
    }

    pub async fn enhance(&self, req: &EnhanceRequest) -> Result<EnhanceResponse, ClientError> {
        self.post("/v1/enhance", req).await
    }

    pub async fn train(&self, req: &TrainRequest) -> Result<TrainResponse, ClientError> {
        self.post("/v1/train", req).await
    }

    pub async fn wer(&self, req: &WerRequest) -> Result<WerReportDto, ClientError> {
        self.post("/v1/eval/wer", req).await
    }

    pub async fn aggregate(&self, req: &AggregateRequest) -> Result<AggregateResponse, ClientError> {
        self.post("/v1/eval/aggregate", req).await
    }

    pub async fn quality(&self, req: &QualityRequest) -> Result<QualityResponse, ClientError> {
        self.post("/v1/quality", req).await
    }

    pub async fn losses(&self, req: &LossRequest) -> Result<LossResponse, ClientError> {
        self.post("/v1/losses", req).await
    }

    pub async fn create_session(&self, req: &CreateSessionRequest) -> Result<SessionInfo, ClientError> {
        self.post("/v1/sessions", req).await
    }

    pub async fn push_buffer(&self, session_id: &str, samples: Vec<f64>) -> Result<PushResponse, ClientError> {
        self.post(&format!("/v1/sessions/{session_id}/buffers"), &PushBufferRequest { samples }).await
    }

    pub async fn flush(&self, session_id: &str) -> Result<PushResponse, ClientError> {
        self.call::<(), _>(Method::POST, &format!("/v1/sessions/{session_id}/flush"), None).await
    }

    pub async fn delete_session(&self, session_id: &str) -> Result<(), ClientError> {
        let resp = self.http.delete(format!("{}/v1/sessions/{session_id}", self.base)).send().await?;
        if resp.status().is_success() {
            return Ok(());
        }
        Err(api_error(resp.status(), resp.text().await?))
    }
}

/// Decodes the service's error body; bodies from elsewhere (a proxy, say)
/// get a kind guessed from the status.
fn api_error(status: StatusCode, text: String) -> ClientError {
    let code = status.as_u16();
    match serde_json::from_str::<ErrorBody>(&text) {
        Ok(ErrorBody { kind, message }) => ClientError::Api { status: code, kind, message },
        Err(_) => {
            let kind = match status {
                StatusCode::NOT_FOUND => "not_found",
                s if s.is_client_error() => "validation",
                _ => "io",
            };
            ClientError::Api { status: code, kind: kind.into(), message: text }
        }
    }
}
