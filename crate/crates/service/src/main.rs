use std::process::ExitCode;

use agentcheck_service::store::SessionStore;
use agentcheck_service::{router, AppState, ServiceConfig};

#[tokio::main]
async fn main() -> ExitCode {
    let config = match ServiceConfig::from_env() {
        Ok(c) => c,
        Err(e) => {
            eprintln!("configuration error: {e}");
            return ExitCode::from(2);
        }
    };
    let store = match SessionStore::open(&config.store_path, config.idle_expiry) {
        Ok(s) => s,
        Err(e) => {
            eprintln!("cannot open {}: {e}", config.store_path.display());
            return ExitCode::from(2);
        }
    };
    let app = router(AppState::new(store, config.policy));
    let listener = match tokio::net::TcpListener::bind(config.bind).await {
        Ok(l) => l,
        Err(e) => {
            eprintln!("cannot bind {}: {e}", config.bind);
            return ExitCode::from(2);
        }
    };
    eprintln!("listening on {}", config.bind);
    if let Err(e) = axum::serve(listener, app).await {
        eprintln!("server error: {e}");
        return ExitCode::from(3);
    }
    ExitCode::SUCCESS
}
