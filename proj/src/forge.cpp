#include "tamperkit/forge.hpp"

#include "tamperkit/annotator.hpp"
#include "tamperkit/errors.hpp"
#include "tamperkit/image_io.hpp"
#include "tamperkit/rng.hpp"
#include "tamperkit/tamper.hpp"

#include <json.hpp>

#include <algorithm>
#include <fstream>
#include <sstream>

namespace tamperkit {

namespace {

bool has_image_extension(const std::filesystem::path& p) {
    std::string ext = p.extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return ext == ".png" || ext == ".jpg" || ext == ".jpeg";
}

std::vector<SourceWord> read_sidecar(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open sidecar " + path.string());
    nlohmann::json j = nlohmann::json::parse(in, nullptr, false);
    if (j.is_discarded() || !j.is_array()) {
        throw SchemaError(path.string() + ": sidecar must be a JSON array");
    }
    std::vector<SourceWord> words;
    for (const nlohmann::json& entry : j) {
        if (!entry.is_object() || !entry.contains("text") || !entry.contains("box")) {
            throw SchemaError(path.string() + ": entries need 'text' and 'box'");
        }
        SourceWord w;
        w.text = entry["text"].get<std::string>();
        const nlohmann::json& b = entry["box"];
        if (!b.is_array() || b.size() != 4) {
            throw SchemaError(path.string() + ": box must be [x_min, y_min, x_max, y_max]");
        }
        w.box = {b[0].get<int>(), b[1].get<int>(), b[2].get<int>(), b[3].get<int>()};
        if (!w.box.valid() || w.text.empty()) {
            throw SchemaError(path.string() + ": invalid word entry");
        }
        words.push_back(std::move(w));
    }
    return words;
}

std::string zero_pad(size_t value, int width) {
    std::ostringstream out;
    out << value;
    std::string s = out.str();
    while (static_cast<int>(s.size()) < width) s.insert(s.begin(), '0');
    return s;
}

} // namespace

std::vector<SourceImage> scan_sources(const std::filesystem::path& dir) {
    if (!std::filesystem::is_directory(dir)) {
        throw IoError("source directory " + dir.string() + " does not exist");
    }
    std::vector<std::filesystem::path> files;
    for (const auto& entry : std::filesystem::directory_iterator(dir)) {
        if (entry.is_regular_file() && has_image_extension(entry.path())) {
            files.push_back(entry.path());
        }
    }
    std::sort(files.begin(), files.end());

    std::vector<SourceImage> sources;
    for (const std::filesystem::path& file : files) {
        SourceImage src;
        src.path = file;
        std::filesystem::path sidecar = file;
        sidecar.replace_extension();
        sidecar += ".words.json";
        if (std::filesystem::exists(sidecar)) src.words = read_sidecar(sidecar);
        sources.push_back(std::move(src));
    }
    return sources;
}

ForgeSummary forge_corpus(const std::filesystem::path& sources_dir,
                          const std::filesystem::path& out_dir, const ForgeOptions& opts) {
    const std::vector<SourceImage> sources = scan_sources(sources_dir);

    // Word boxes must leave room for a solvable interior when blending.
    std::vector<size_t> donors;
    for (size_t i = 0; i < sources.size(); ++i) {
        for (const SourceWord& w : sources[i].words) {
            if (w.box.width() >= 3 && w.box.height() >= 3) {
                donors.push_back(i);
                break;
            }
        }
    }
    if (opts.tampered > 0 && donors.empty()) {
        throw SchemaError("no source image carries a usable .words.json sidecar");
    }
    if (sources.empty()) {
        throw SchemaError("no PNG/JPEG sources in " + sources_dir.string());
    }
    if (opts.method == ForgeMethod::Splicing && opts.tampered > 0 && sources.size() < 2) {
        throw SchemaError("splicing needs at least two source images");
    }

    std::filesystem::create_directories(out_dir / "images");
    std::filesystem::create_directories(out_dir / "masks");

    ForgeSummary summary;
    std::vector<TamperRecord> records;

    for (int i = 0; i < opts.tampered; ++i) {
        SplitMix rng = record_stream(opts.seed, static_cast<uint64_t>(i));

        const SourceImage& donor_src = sources[donors[rng.below(donors.size())]];
        std::vector<const SourceWord*> usable;
        for (const SourceWord& w : donor_src.words) {
            if (w.box.width() >= 3 && w.box.height() >= 3) usable.push_back(&w);
        }
        const SourceWord& word = *usable[rng.below(usable.size())];

        TamperMethod method;
        switch (opts.method) {
        case ForgeMethod::CopyMove: method = TamperMethod::CopyMove; break;
        case ForgeMethod::Splicing: method = TamperMethod::Splicing; break;
        default: method = rng.below(2) == 0 ? TamperMethod::CopyMove : TamperMethod::Splicing;
        }
        if (method == TamperMethod::Splicing && sources.size() < 2) {
            method = TamperMethod::CopyMove;
        }

        const std::string id =
            (method == TamperMethod::CopyMove ? "cm_" : "sp_") + zero_pad(i, 4);
        try {
            const ImageBuf donor_img = read_image(donor_src.path);
            if (!word.box.inside(donor_img.width, donor_img.height)) {
                throw BoundsError("sidecar box exceeds " + donor_src.path.string());
            }

            // Splicing pastes the donor word into a different acceptor image.
            const SourceImage* acceptor_src = &donor_src;
            if (method == TamperMethod::Splicing) {
                for (int tries = 0; tries < 16 && acceptor_src == &donor_src; ++tries) {
                    acceptor_src = &sources[rng.below(sources.size())];
                }
            }
            const ImageBuf acceptor = acceptor_src == &donor_src
                                          ? donor_img
                                          : read_image(acceptor_src->path);

            if (acceptor.width < word.box.width() || acceptor.height < word.box.height()) {
                throw BoundsError("acceptor smaller than the pasted word");
            }
            const int max_x = acceptor.width - word.box.width();
            const int max_y = acceptor.height - word.box.height();
            int dest_x = 0;
            int dest_y = 0;
            for (int tries = 0; tries < 16; ++tries) {
                dest_x = static_cast<int>(rng.below(static_cast<uint64_t>(max_x) + 1));
                dest_y = static_cast<int>(rng.below(static_cast<uint64_t>(max_y) + 1));
                const bool self_paste = method == TamperMethod::CopyMove &&
                                        dest_x == word.box.x_min && dest_y == word.box.y_min;
                const BBox dest{dest_x, dest_y, dest_x + word.box.width(),
                                dest_y + word.box.height()};
                if (!self_paste && (acceptor_src != &donor_src || iou(dest, word.box) == 0.0)) {
                    break;
                }
            }

            bool blended = opts.blend;
            TamperResult result;
            try {
                result = method == TamperMethod::CopyMove
                             ? copy_move(acceptor, word.box, dest_x, dest_y, blended,
                                         opts.solver)
                             : splice(acceptor, donor_img, word.box, dest_x, dest_y, blended,
                                      opts.solver);
            } catch (const NonConvergence&) {
                // Hard paste instead; reported in the summary, never silent.
                blended = false;
                summary.blend_fallbacks.push_back(id);
                result = method == TamperMethod::CopyMove
                             ? copy_move(acceptor, word.box, dest_x, dest_y, false)
                             : splice(acceptor, donor_img, word.box, dest_x, dest_y, false);
            }

            TamperRecord rec;
            rec.id = id;
            rec.image_path = "images/" + id + ".png";
            rec.mask_path = "masks/" + id + ".png";
            rec.method = method == TamperMethod::CopyMove ? Method::CopyMove : Method::Splicing;
            rec.blend = blended;
            rec.language_tags = {"en"};
            rec.gt_ocr = word.text;
            rec.description = "";
            rec.boxes = mask_to_boxes(result.mask);
            write_png(result.image, out_dir / rec.image_path);
            write_png(result.mask, out_dir / *rec.mask_path);
            records.push_back(std::move(rec));
            ++summary.forged;
        } catch (const Error& e) {
            summary.failures.emplace_back(id, e.what());
        }
    }

    for (int i = 0; i < opts.authentic; ++i) {
        const SourceImage& src = sources[static_cast<size_t>(i) % sources.size()];
        const std::string id = "au_" + zero_pad(static_cast<size_t>(i), 4);
        try {
            // Authentic images pass through byte-identical.
            const std::string rel = "images/" + id + src.path.extension().string();
            std::filesystem::copy_file(src.path, out_dir / rel,
                                       std::filesystem::copy_options::overwrite_existing);
            TamperRecord rec;
            rec.id = id;
            rec.image_path = rel;
            rec.method = Method::Authentic;
            rec.language_tags = {"en"};
            rec.description = authentic_annotation();
            records.push_back(std::move(rec));
            ++summary.authentic;
        } catch (const std::filesystem::filesystem_error& e) {
            summary.failures.emplace_back(id, e.what());
        }
    }

    split_assign(records, opts.ratios, opts.seed);
    write_manifest(records, out_dir / "manifest.jsonl");
    return summary;
}

} // namespace tamperkit
