#include "tamperkit/annotator.hpp"

#include "tamperkit/errors.hpp"
#include "tamperkit/image_io.hpp"
#include "tamperkit/metrics.hpp"
#include "tamperkit/parallel.hpp"
#include "tamperkit/prompts.hpp"
#include "tamperkit/textutil.hpp"

#include <httplib.h>

#include <cerrno>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <thread>

namespace tamperkit {

std::string authentic_annotation() {
    return "There is no tampered text in this image.";
}

AnnotatorResponse parse_response_text(const std::string& raw) {
    AnnotatorResponse r;
    r.raw_text = raw;
    const text::SentenceSplit split = text::split_first_sentence(raw);
    r.parsed_ocr = text::first_quoted_span(split.first);
    r.parsed_description = split.remainder;
    return r;
}

namespace {

// Replaces the content of the first quoted span of the first sentence,
// keeping every other byte (including the quote glyphs) as received.
std::string substitute_first_quote(const std::string& raw, const std::string& replacement) {
    const text::SentenceSplit split = text::split_first_sentence(raw);
    const std::u32string u = text::utf8_decode(split.first);
    size_t open = std::u32string::npos;
    size_t close = std::u32string::npos;
    for (size_t i = 0; i < u.size(); ++i) {
        if (!text::is_double_quote(u[i])) continue;
        if (open == std::u32string::npos) {
            open = i;
        } else {
            close = i;
            break;
        }
    }
    if (close == std::u32string::npos) return raw;
    return text::utf8_encode(u.substr(0, open + 1)) + replacement +
           text::utf8_encode(u.substr(close)) + split.remainder;
}

} // namespace

FilterDecision filter_response(const AnnotatorResponse& response, const std::string& gt_ocr,
                               double threshold) {
    if (gt_ocr.empty()) {
        throw EmptyGroundTruth("filtering needs a non-empty ground-truth OCR string");
    }
    FilterDecision d;
    d.ocr_accuracy = acc_ocr(response.parsed_ocr, gt_ocr);
    d.kept = d.ocr_accuracy >= threshold;
    d.final_description =
        d.kept ? substitute_first_quote(response.raw_text, gt_ocr) : response.raw_text;
    return d;
}

std::string fixture_key(const AnnotatorRequest& request) {
    uint64_t h = 0xcbf29ce484222325ull;
    for (const ImageBuf& img : request.images) {
        const uint32_t header[2] = {static_cast<uint32_t>(img.width),
                                    static_cast<uint32_t>(img.height)};
        h = text::fnv1a64(reinterpret_cast<const uint8_t*>(header), sizeof(header), h);
        h = text::fnv1a64(img.data.data(), img.data.size(), h);
    }
    return text::to_hex64(h);
}

nlohmann::json chat_fixture_body(const std::string& assistant_text) {
    return {{"object", "chat.completion"},
            {"choices",
             {{{"index", 0},
               {"message", {{"role", "assistant"}, {"content", assistant_text}}},
               {"finish_reason", "stop"}}}}};
}

nlohmann::json chat_request_body(const AnnotatorRequest& request) {
    nlohmann::json content = nlohmann::json::array();
    content.push_back({{"type", "text"}, {"text", request.query}});
    for (const ImageBuf& img : request.images) {
        const std::vector<uint8_t> png = encode_png(img);
        content.push_back(
            {{"type", "image_url"},
             {"image_url",
              {{"url", "data:image/png;base64," +
                           text::base64_encode(png.data(), png.size())}}}});
    }
    return {{"model", request.model_id},
            {"temperature", request.temperature},
            {"messages", {{{"role", "user"}, {"content", content}}}}};
}

std::string chat_body_content(const std::string& body) {
    nlohmann::json j = nlohmann::json::parse(body, nullptr, false);
    if (j.is_discarded()) throw MalformedResponse("response body is not valid JSON");
    try {
        return j.at("choices").at(0).at("message").at("content").get<std::string>();
    } catch (const nlohmann::json::exception&) {
        throw MalformedResponse("response body carries no choices[0].message.content");
    }
}

HttpAnnotatorClient::HttpAnnotatorClient(HttpClientOptions options)
    : options_(std::move(options)) {
    if (options_.endpoint.empty()) {
        throw TransportError("annotator endpoint is not configured");
    }
}

std::string HttpAnnotatorClient::complete(const AnnotatorRequest& request) {
    // Split endpoint into origin + path; httplib clients take the origin.
    const std::string& url = options_.endpoint;
    const size_t scheme_end = url.find("://");
    if (scheme_end == std::string::npos) {
        throw TransportError("endpoint must start with http:// or https://");
    }
    const size_t path_start = url.find('/', scheme_end + 3);
    const std::string origin = path_start == std::string::npos ? url : url.substr(0, path_start);
    const std::string path =
        path_start == std::string::npos ? "/v1/chat/completions" : url.substr(path_start);

    httplib::Client client(origin);
    client.set_connection_timeout(options_.timeout_seconds, 0);
    client.set_read_timeout(options_.timeout_seconds, 0);

    httplib::Headers headers;
    if (const char* key = std::getenv(options_.api_key_env.c_str()); key && *key) {
        headers.emplace("Authorization", std::string("Bearer ") + key);
    }

    AnnotatorRequest full = request;
    if (full.model_id.empty()) full.model_id = options_.model_id;
    full.temperature = options_.temperature;
    const std::string body = chat_request_body(full).dump();

    httplib::Result res = client.Post(path, headers, body, "application/json");
    if (!res) {
        throw TransportError("request to " + origin + path + " failed: " +
                             httplib::to_string(res.error()));
    }
    if (res->status < 200 || res->status >= 300) {
        throw TransportError("endpoint returned HTTP " + std::to_string(res->status));
    }
    return chat_body_content(res->body);
}

MockAnnotatorClient::MockAnnotatorClient(std::filesystem::path fixtures_dir)
    : fixtures_dir_(std::move(fixtures_dir)) {
    if (!std::filesystem::is_directory(fixtures_dir_)) {
        throw IoError("fixtures directory " + fixtures_dir_.string() + " does not exist");
    }
}

std::string MockAnnotatorClient::complete(const AnnotatorRequest& request) {
    std::filesystem::path file = fixtures_dir_ / (fixture_key(request) + ".json");
    if (!std::filesystem::exists(file)) {
        const std::filesystem::path fallback = fixtures_dir_ / "default.json";
        if (!std::filesystem::exists(fallback)) {
            throw TransportError("no fixture " + file.filename().string() +
                                 " (and no default.json) in " + fixtures_dir_.string());
        }
        file = fallback;
    }
    std::ifstream in(file);
    if (!in) throw IoError("cannot open fixture " + file.string());
    const std::string body((std::istreambuf_iterator<char>(in)),
                           std::istreambuf_iterator<char>());
    return chat_body_content(body);
}

AnnotatorResponse annotate_images(const ImageBuf& image, const BinaryMask& mask,
                                  AnnotatorClient& client, const AnnotateOptions& opts) {
    AnnotatorRequest request;
    request.query = build_annotation_query().text;
    request.images = {image, render_fused_mask(image, mask, opts.lambda1, opts.lambda2)};
    request.model_id = opts.model_id;
    request.temperature = opts.temperature;

    std::chrono::milliseconds backoff = opts.backoff_base;
    for (int attempt = 0;; ++attempt) {
        try {
            return parse_response_text(client.complete(request));
        } catch (const TransportError&) {
            if (attempt >= opts.max_retries) throw;
            if (backoff.count() > 0) std::this_thread::sleep_for(backoff);
            backoff = std::chrono::milliseconds(
                static_cast<long long>(backoff.count() * opts.backoff_multiplier));
        }
    }
}

AnnotatorResponse annotate(const TamperRecord& record, const std::filesystem::path& root,
                           AnnotatorClient& client, const AnnotateOptions& opts) {
    if (!record.mask_path) {
        throw MissingGroundTruth("record " + record.id + " has no mask to annotate against");
    }
    const ImageBuf image = read_image(root / record.image_path);
    const BinaryMask mask = read_mask_png(root / *record.mask_path);
    return annotate_images(image, mask, client, opts);
}

AnnotateRun annotate_corpus(const std::filesystem::path& manifest_path,
                            const std::filesystem::path& responses_out,
                            AnnotatorClient& client, const AnnotateOptions& opts) {
    const std::vector<TamperRecord> records = read_manifest(manifest_path);
    const std::filesystem::path root = manifest_path.has_parent_path()
                                           ? manifest_path.parent_path()
                                           : std::filesystem::path(".");

    std::vector<const TamperRecord*> tampered;
    for (const TamperRecord& r : records) {
        if (r.tampered()) tampered.push_back(&r);
    }

    AnnotateRun run;
    run.attempted = tampered.size();
    std::vector<std::optional<AnnotatorResponse>> responses(tampered.size());
    std::vector<std::string> errors(tampered.size());
    const unsigned threads = opts.concurrency > 0 ? static_cast<unsigned>(opts.concurrency) : 1;
    parallel_for(tampered.size(), threads, [&](size_t i) {
        try {
            responses[i] = annotate(*tampered[i], root, client, opts);
        } catch (const Error& e) {
            errors[i] = e.what();
        }
    });

    if (responses_out.has_parent_path()) {
        std::filesystem::create_directories(responses_out.parent_path());
    }
    std::ofstream out(responses_out, std::ios::trunc);
    if (!out) throw IoError("cannot open " + responses_out.string() + " for writing");
    for (size_t i = 0; i < tampered.size(); ++i) {
        if (!responses[i]) {
            run.failures.emplace_back(tampered[i]->id, errors[i]);
            continue;
        }
        ++run.succeeded;
        const nlohmann::json row = {{"id", tampered[i]->id},
                                    {"raw_text", responses[i]->raw_text},
                                    {"parsed_ocr", responses[i]->parsed_ocr},
                                    {"parsed_description", responses[i]->parsed_description}};
        out << row.dump() << '\n';
    }
    if (!out) throw IoError("write failed for " + responses_out.string());
    return run;
}

FilterRun filter_corpus(const std::filesystem::path& responses_jsonl,
                        const std::filesystem::path& manifest_path,
                        const std::filesystem::path& decisions_out,
                        const std::filesystem::path& manifest_out, double threshold) {
    std::vector<TamperRecord> records = read_manifest(manifest_path);

    std::unordered_map<std::string, AnnotatorResponse> responses;
    {
        std::ifstream in(responses_jsonl);
        if (!in) {
            throw IoError("cannot open " + responses_jsonl.string() + ": " +
                          std::strerror(errno));
        }
        std::string line;
        size_t line_no = 0;
        while (std::getline(in, line)) {
            ++line_no;
            if (line.empty()) continue;
            nlohmann::json j = nlohmann::json::parse(line, nullptr, false);
            if (j.is_discarded() || !j.is_object() || !j.contains("id") ||
                !j.contains("raw_text")) {
                throw SchemaError(responses_jsonl.string(), line_no,
                                  "expected an object with 'id' and 'raw_text'");
            }
            responses[j["id"].get<std::string>()] =
                parse_response_text(j["raw_text"].get<std::string>());
        }
    }

    FilterRun run;
    std::unordered_map<std::string, FilterDecision> decisions;
    if (decisions_out.has_parent_path()) {
        std::filesystem::create_directories(decisions_out.parent_path());
    }
    std::ofstream out(decisions_out, std::ios::trunc);
    if (!out) throw IoError("cannot open " + decisions_out.string() + " for writing");
    for (const TamperRecord& r : records) {
        if (!r.tampered()) continue;
        const auto it = responses.find(r.id);
        if (it == responses.end()) {
            run.missing_responses.push_back(r.id);
            continue;
        }
        const FilterDecision d = filter_response(it->second, *r.gt_ocr, threshold);
        ++run.evaluated;
        d.kept ? ++run.kept : ++run.rejected;
        decisions[r.id] = d;
        out << nlohmann::json{{"id", r.id},
                              {"ocr_accuracy", d.ocr_accuracy},
                              {"kept", d.kept},
                              {"final_description", d.final_description}}
                   .dump()
            << '\n';
    }
    if (!out) throw IoError("write failed for " + decisions_out.string());

    if (!manifest_out.empty()) {
        std::vector<TamperRecord> filtered;
        for (TamperRecord& r : records) {
            if (!r.tampered()) {
                filtered.push_back(std::move(r));
                continue;
            }
            const auto it = decisions.find(r.id);
            if (it == decisions.end() || !it->second.kept) continue;
            r.description = it->second.final_description;
            filtered.push_back(std::move(r));
        }
        write_manifest(filtered, manifest_out);
    }
    return run;
}

} // namespace tamperkit
