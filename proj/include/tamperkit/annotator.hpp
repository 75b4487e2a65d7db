#pragma once

#include "tamperkit/dataset.hpp"
#include "tamperkit/imaging.hpp"

#include <array>
#include <chrono>
#include <filesystem>
#include <memory>
#include <string>
#include <vector>

namespace tamperkit {

/// Fixed description every authentic record carries.
std::string authentic_annotation();

/// One request to the vision-chat annotator: the query plus exactly two
/// images, image A the tampered image and image B the fused mask render.
struct AnnotatorRequest {
    std::string query;
    std::array<ImageBuf, 2> images;
    std::string model_id;
    double temperature = 0.0;
};

/// Parsed annotator reply. parsed_ocr is the content within the quotation
/// marks of the first sentence (empty when no quoted span exists);
/// parsed_description is the exact remainder after that sentence.
struct AnnotatorResponse {
    std::string raw_text;
    std::string parsed_ocr;
    std::string parsed_description;
};

AnnotatorResponse parse_response_text(const std::string& raw);

/// OCR-accuracy gate over a response, threshold inclusive. Kept responses
/// get the quoted OCR of the first sentence replaced by the ground truth.
struct FilterDecision {
    double ocr_accuracy = 0.0;
    bool kept = false;
    std::string final_description;
};

FilterDecision filter_response(const AnnotatorResponse& response, const std::string& gt_ocr,
                               double threshold = 0.8);

/// Transport abstraction over the chat endpoint. complete() returns the
/// assistant text for one request; throws TransportError on transport
/// failure and MalformedResponse when the body cannot be interpreted.
class AnnotatorClient {
public:
    virtual ~AnnotatorClient() = default;
    virtual std::string complete(const AnnotatorRequest& request) = 0;
};

struct HttpClientOptions {
    std::string endpoint; // e.g. http://host:port/v1/chat/completions
    std::string model_id;
    std::string api_key_env = "ANNOTATOR_API_KEY";
    double temperature = 0.0;
    int timeout_seconds = 120;
};

/// OpenAI-compatible chat-completions client. Images travel as base64 PNG
/// data URLs inside the user message's content parts.
class HttpAnnotatorClient : public AnnotatorClient {
public:
    explicit HttpAnnotatorClient(HttpClientOptions options);
    std::string complete(const AnnotatorRequest& request) override;

private:
    HttpClientOptions options_;
};

/// Deterministic offline stand-in: responses are chat-completion bodies
/// read from <fixtures_dir>/<fixture_key>.json, with default.json as an
/// optional fallback for unknown keys.
class MockAnnotatorClient : public AnnotatorClient {
public:
    explicit MockAnnotatorClient(std::filesystem::path fixtures_dir);
    std::string complete(const AnnotatorRequest& request) override;

private:
    std::filesystem::path fixtures_dir_;
};

/// Content hash of the request images; names the mock fixture file.
std::string fixture_key(const AnnotatorRequest& request);

/// Chat-completions response body carrying the given assistant text,
/// for writing mock fixtures.
nlohmann::json chat_fixture_body(const std::string& assistant_text);

/// Request body the HTTP client posts (exposed for tests).
nlohmann::json chat_request_body(const AnnotatorRequest& request);

/// Assistant text out of a chat-completions response body.
std::string chat_body_content(const std::string& body);

struct AnnotateOptions {
    std::string model_id;
    double temperature = 0.0;
    double lambda1 = 0.5;
    double lambda2 = 0.5;
    int max_retries = 3;
    std::chrono::milliseconds backoff_base{200};
    double backoff_multiplier = 2.0;
    int concurrency = 4;
};

/// Builds the annotation query and the fused-mask render for one sample and
/// drives the client, retrying transient transport failures with
/// exponential backoff.
AnnotatorResponse annotate_images(const ImageBuf& image, const BinaryMask& mask,
                                  AnnotatorClient& client, const AnnotateOptions& opts = {});

/// Same, loading pixels from a record's files under root.
AnnotatorResponse annotate(const TamperRecord& record, const std::filesystem::path& root,
                           AnnotatorClient& client, const AnnotateOptions& opts = {});

// ---- corpus-level pipeline entries ----

struct AnnotateRun {
    size_t attempted = 0;
    size_t succeeded = 0;
    std::vector<std::pair<std::string, std::string>> failures; // id, message
};

/// Annotates every tampered record of a manifest, writing one JSONL row
/// {id, raw_text, parsed_ocr, parsed_description} per success.
AnnotateRun annotate_corpus(const std::filesystem::path& manifest_path,
                            const std::filesystem::path& responses_out,
                            AnnotatorClient& client, const AnnotateOptions& opts = {});

struct FilterRun {
    size_t evaluated = 0;
    size_t kept = 0;
    size_t rejected = 0;
    std::vector<std::string> missing_responses; // tampered ids with no response row
};

/// Applies the OCR-accuracy gate to recorded responses. decisions_out gets
/// one row {id, ocr_accuracy, kept, final_description} per response. When
/// manifest_out is non-empty an updated manifest is written there (same
/// directory layout): kept tampered records adopt the corrected description,
/// rejected tampered records are dropped, authentic records pass through.
FilterRun filter_corpus(const std::filesystem::path& responses_jsonl,
                        const std::filesystem::path& manifest_path,
                        const std::filesystem::path& decisions_out,
                        const std::filesystem::path& manifest_out = {},
                        double threshold = 0.8);

} // namespace tamperkit
