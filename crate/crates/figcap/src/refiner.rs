//! External paragraph refinement through an OpenAI-compatible chat endpoint,
//! with a rule-based fallback when the endpoint fails.

use std::time::Duration;

use figcap_core::refine::{
    most_mentioned_figure, refine_record_rule_based, FigureRecord, Provenance,
    RefinementResult,
};
use serde::{Deserialize, Serialize};

use crate::config::RefinerSettings;
use crate::error::{Error, Result};

/// Instruction sent ahead of the paragraph and mention payload.
pub const REFINE_PROMPT: &str = "The content I provide includes two sections, namely \u{2018}paragraph\u{2019} and \u{2018}mention\u{2019}. \u{2018}Paragraph\u{2019} and \u{2018}mention\u{2019} are data related to figures or tables in a paper. According to the most mentioned figure in the \u{2018}mention\u{2019} section, provide detailed information about this figure from the \u{2018}paragraph\u{2019} section!";

/// Resolved endpoint parameters for one run.
#[derive(Debug, Clone)]
pub struct RefinerEndpoint {
    pub url: String,
    pub model: String,
    pub timeout: Duration,
    pub auth_token: Option<String>,
}

impl RefinerEndpoint {
    /// Builds endpoint parameters from settings; external mode requires a URL.
    pub fn from_settings(settings: &RefinerSettings) -> Result<Self> {
        let url = settings.endpoint.clone().ok_or_else(|| {
            Error::Config(
                "external refinement requires an endpoint (set refiner.endpoint, \
                 FIGCAP_ENDPOINT, or --endpoint)"
                    .into(),
            )
        })?;
        Ok(Self {
            url,
            model: settings.model.clone(),
            timeout: Duration::from_secs(settings.timeout_secs),
            auth_token: std::env::var(&settings.auth_env).ok(),
        })
    }
}

#[derive(Serialize)]
struct ChatMessage<'a> {
    role: &'static str,
    content: &'a str,
}

#[derive(Serialize)]
struct ChatRequest<'a> {
    model: &'a str,
    messages: [ChatMessage<'a>; 1],
}

#[derive(Deserialize)]
struct ChatChoiceMessage {
    content: String,
}

#[derive(Deserialize)]
struct ChatChoice {
    message: ChatChoiceMessage,
}

#[derive(Deserialize)]
struct ChatResponse {
    choices: Vec<ChatChoice>,
}

/// Builds the user-message content for one record.
pub fn prompt_content(paragraph: &str, mentions: &[String]) -> String {
    format!(
        "{REFINE_PROMPT}\n\nparagraph: {paragraph}\n\nmention: {}",
        mentions.join(" ")
    )
}

/// Client for the external refinement endpoint.
pub struct ExternalRefiner {
    endpoint: RefinerEndpoint,
    client: reqwest::blocking::Client,
}

impl ExternalRefiner {
    pub fn new(endpoint: RefinerEndpoint) -> Result<Self> {
        let client = reqwest::blocking::Client::builder()
            .timeout(endpoint.timeout)
            .build()?;
        Ok(Self { endpoint, client })
    }

    /// Sends one chat-completion request and returns the reply text.
    fn request(&self, content: &str) -> Result<String> {
        let body = ChatRequest {
            model: &self.endpoint.model,
            messages: [ChatMessage {
                role: "user",
                content,
            }],
        };
        let mut request = self.client.post(&self.endpoint.url).json(&body);
        if let Some(token) = &self.endpoint.auth_token {
            request = request.bearer_auth(token);
        }
        let response: ChatResponse =
            request.send()?.error_for_status()?.json()?;
        let choice = response
            .choices
            .into_iter()
            .next()
            .ok_or_else(|| Error::Refiner("response carried no choices".into()))?;
        Ok(choice.message.content)
    }

    /// Refines one record, falling back to the rule-based path on any
    /// endpoint failure so a batch always completes.
    pub fn refine_record(
        &self,
        record: &FigureRecord,
        char_budget: usize,
    ) -> RefinementResult {
        let target = most_mentioned_figure(&record.mentions).ok();
        let content = prompt_content(&record.paragraph, &record.mentions);
        match self.request(&content) {
            Ok(text) => {
                // Raw replies go to stderr so a run can be replayed even
                // when the character budget truncates the stored result.
                let log = serde_json::json!({"id": record.id, "response": text});
                eprintln!("response: {log}");
                RefinementResult::new(
                    target,
                    clamp_chars(&text, char_budget),
                    Provenance::ExternalLlm,
                )
            }
            Err(e) => {
                eprintln!("record `{}`: endpoint failed ({e}); using rules", record.id);
                // Budget 0 is rejected by config validation; clamp defensively.
                refine_record_rule_based(record, char_budget.max(1))
                    .unwrap_or_else(|_| {
                        RefinementResult::new(
                            target,
                            record.paragraph.clone(),
                            Provenance::Passthrough,
                        )
                    })
            }
        }
    }
}

/// Truncates to at most `budget` characters on a char boundary.
fn clamp_chars(text: &str, budget: usize) -> String {
    match text.char_indices().nth(budget) {
        Some((byte, _)) => text[..byte].to_string(),
        None => text.to_string(),
    }
}
