use std::net::SocketAddr;

use tokio::net::TcpListener;
use tokio::task::JoinHandle;

use crate::api::{router, system_clock, AppState};
use crate::config::Config;
use crate::service::Service;

#[derive(Debug, thiserror::Error)]
pub enum ServeError {
    #[error("cannot bind {addr}: {source}")]
    BindFailure { addr: String, source: std::io::Error },
    #[error(transparent)]
    Store(#[from] crate::eventlog::StoreError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Recovers state from the data directory, then serves until Ctrl-C.
pub async fn serve(cfg: &Config) -> Result<(), ServeError> {
    let service = Service::open(&cfg.data_dir, cfg.schedule, cfg.snapshot_every)?;
    let addr = format!("{}:{}", cfg.bind, cfg.port);
    let listener = TcpListener::bind(&addr).await.map_err(|source| ServeError::BindFailure { addr: addr.clone(), source })?;
    eprintln!("recovered {} events; listening on {}", service.last_seq(), listener.local_addr()?);
    let app = router(AppState::new(service, system_clock()));
    axum::serve(listener, app)
        .with_graceful_shutdown(async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await?;
    Ok(())
}

/// Serves `state` on an ephemeral localhost port in the background.
pub async fn spawn(state: AppState) -> std::io::Result<(SocketAddr, JoinHandle<()>)> {
    let listener = TcpListener::bind("127.0.0.1:0").await?;
    let addr = listener.local_addr()?;
    let handle = tokio::spawn(async move {
        axum::serve(listener, router(state)).await.expect("embedded server runs");
    });
    Ok((addr, handle))
}
