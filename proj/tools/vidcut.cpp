// vidcut command-line front end.
//
//   segment          per-video graph-cut segmentation
//   filter           frame relevance intervals from classifier scores
//   retrieve-sim     clip selection over a scored video manifest
//   fuse             per-pixel class labels from per-class probability maps
//   eval             mIoU over prediction / ground-truth mask pairs
//   export-trainset  attention / mask training pairs from segment outputs
//   gen-synthetic    synthetic clip with analytic ground truth

#include "vidcut/config.hpp"
#include "vidcut/error.hpp"
#include "vidcut/pipeline.hpp"
#include "vidcut/retrieval.hpp"
#include "vidcut/synthetic.hpp"

#include <atomic>
#include <exception>
#include <filesystem>
#include <iostream>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"

namespace fs = std::filesystem;
using namespace vidcut;

namespace {

struct ConfigFlags {
    std::string path;
    std::vector<std::string> overrides;

    void attach(CLI::App* app) {
        app->add_option("--config", path, "JSON config file (// comments allowed)");
        app->add_option("--set", overrides, "Override one key, e.g. energy.gamma=2 (repeatable)");
    }

    PipelineConfig load() const {
        nlohmann::json j = nlohmann::json::object();
        if (!path.empty()) j = read_json_file(path);
        for (const auto& o : overrides) apply_override(j, o);
        return PipelineConfig::from_json(j);
    }
};

void print_warnings(const std::string& who, const std::vector<std::string>& warnings) {
    for (const auto& w : warnings) std::cerr << "warning: " << who << ": " << w << '\n';
}

// ---- segment --------------------------------------------------------------

struct SegmentArgs {
    std::vector<std::string> inputs;
    std::string class_name;
    std::string out;
    int jobs = 0;
    bool allow_estimated = false;
    std::string dump_intermediates;
    std::string dump_energy;
    ConfigFlags config;
};

void segment_one(const SegmentArgs& a, const PipelineConfig& cfg, const fs::path& in_dir, const fs::path& out_dir) {
    std::vector<std::string> warnings;
    const auto inputs = load_video_dir(in_dir, a.class_name, cfg, &warnings);
    DumpOptions dump;
    const auto sub = a.inputs.size() > 1 ? in_dir.filename() : fs::path();
    if (!a.dump_intermediates.empty()) dump.intermediates_dir = fs::path(a.dump_intermediates) / sub;
    if (!a.dump_energy.empty()) dump.energy_dir = fs::path(a.dump_energy) / sub;

    auto result = segment_video(inputs, cfg, dump);
    result.warnings.insert(result.warnings.begin(), warnings.begin(), warnings.end());

    fs::create_directories(out_dir);
    for (std::size_t t = 0; t < result.masks.size(); ++t) {
        const int ti = static_cast<int>(t);
        write_mask(out_dir / frame_name("mask", ti, ".pgm"), result.masks[t]);
        write_tensor(out_dir / frame_name("attention", ti, ".tnsr"), attention_to_tensor(result.attention[t]));
    }
    auto summary = result.summary_json();
    summary["input"] = in_dir.string();
    summary["class_id"] = inputs.class_id;
    write_json_file(out_dir / "segment.json", summary);
    print_warnings(in_dir.string(), result.warnings);
}

int run_segment(const SegmentArgs& a) {
    auto cfg = a.config.load();
    if (a.allow_estimated) cfg.flow.allow_estimated = true;
    if (a.jobs > 0) cfg.jobs = a.jobs;

    const auto n = a.inputs.size();
    auto out_for = [&](std::size_t i) {
        return n > 1 ? fs::path(a.out) / fs::path(a.inputs[i]).filename() : fs::path(a.out);
    };

    std::vector<std::exception_ptr> errors(n);
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < n; i = next++) {
            try {
                segment_one(a, cfg, a.inputs[i], out_for(i));
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };
    const auto workers = std::min<std::size_t>(static_cast<std::size_t>(cfg.jobs), n);
    if (workers <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (std::size_t k = 0; k < workers; ++k) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }
    for (std::size_t i = 0; i < n; ++i) {
        if (!errors[i]) continue;
        try {
            std::rethrow_exception(errors[i]);
        } catch (const InvariantError& e) {
            throw InvariantError(a.inputs[i] + ": " + e.what());
        } catch (const InputError& e) {
            throw InputError(a.inputs[i] + ": " + e.what());
        }
    }
    return 0;
}

// ---- filter ---------------------------------------------------------------

struct FilterArgs {
    std::string scores;
    std::string class_name;
    std::string out;
    ConfigFlags config;
};

int run_filter(const FilterArgs& a) {
    const auto cfg = a.config.load();
    const auto scores = ClassScores::from_json(read_json_file(a.scores));
    const int id = scores.class_index(a.class_name);
    const auto intervals = relevance_filter(scores, id, cfg.attention.relevance_threshold, cfg.attention.min_run);
    nlohmann::json list = nlohmann::json::array();
    for (const auto& iv : intervals) list.push_back({iv.start_frame, iv.end_frame});
    const nlohmann::json j = {{"class", scores.classes[id]}, {"class_id", id}, {"intervals", list}};
    if (a.out.empty())
        std::cout << j.dump(2) << '\n';
    else
        write_json_file(a.out, j);
    return 0;
}

// ---- retrieve-sim ---------------------------------------------------------

struct RetrieveArgs {
    std::string manifest;
    std::string out;
    ConfigFlags config;
};

int run_retrieve(const RetrieveArgs& a) {
    const auto cfg = a.config.load();
    const auto manifest = CorpusManifest::from_json(read_json_file(a.manifest));
    const auto j = selections_to_json(retrieval_filter(manifest, cfg.retrieval));
    if (a.out.empty())
        std::cout << j.dump(2) << '\n';
    else
        write_json_file(a.out, j);
    return 0;
}

// ---- fuse -----------------------------------------------------------------

struct FuseArgs {
    std::vector<std::string> maps;
    std::string out;
    double bg_threshold = -1.0;
    ConfigFlags config;
};

int run_fuse(const FuseArgs& a) {
    const auto cfg = a.config.load();
    std::vector<AttentionMap> probs;
    std::vector<int> ids;
    for (const auto& m : a.maps) {
        const auto eq = m.find('=');
        if (eq == std::string::npos || eq == 0) throw InputError("--map expects ID=path.tnsr, got '" + m + "'");
        int id = 0;
        try {
            std::size_t used = 0;
            id = std::stoi(m.substr(0, eq), &used);
            if (used != eq) throw std::invalid_argument("trailing");
        } catch (const std::exception&) {
            throw InputError("--map: bad class id in '" + m + "'");
        }
        ids.push_back(id);
        probs.push_back(attention_from_tensor(read_tensor(m.substr(eq + 1))));
    }
    const double thr = a.bg_threshold >= 0.0 ? a.bg_threshold : cfg.fuse_background_threshold;
    write_netpbm(a.out, fuse_labels(probs, ids, thr));
    return 0;
}

// ---- eval -----------------------------------------------------------------

struct EvalArgs {
    std::string pairs;
    std::string pred;
    std::string gt;
    int class_id = 1;
    std::string video = "video";
    std::string out;
};

Image read_gray(const fs::path& p) {
    auto img = read_netpbm(p);
    if (img.channels != 1) throw InputError(p.string() + ": expected a P5 mask");
    return img;
}

int run_eval(const EvalArgs& a) {
    std::vector<EvalItem> items;
    if (!a.pairs.empty()) {
        const fs::path base = fs::path(a.pairs).parent_path();
        const auto j = read_json_file(a.pairs);
        try {
            for (const auto& e : j.at("pairs")) {
                EvalItem item;
                item.video = e.value("video", std::string("video"));
                item.class_id = e.value("class", 1);
                item.prediction = read_gray(base / e.at("pred").get<std::string>());
                item.ground_truth = read_gray(base / e.at("gt").get<std::string>());
                items.push_back(std::move(item));
            }
        } catch (const nlohmann::json::exception& e) {
            throw InputError(a.pairs + ": " + e.what());
        }
    } else {
        if (a.pred.empty() || a.gt.empty()) throw InputError("eval: give --pairs or both --pred and --gt");
        for (int t = 0;; ++t) {
            const auto g = fs::path(a.gt) / frame_name("gt", t, ".pgm");
            if (!fs::exists(g)) break;
            items.push_back({a.video, a.class_id, read_gray(fs::path(a.pred) / frame_name("mask", t, ".pgm")),
                             read_gray(g)});
        }
        if (items.empty()) throw InputError("eval: no gt_000000.pgm in " + a.gt);
    }
    const auto j = evaluate_miou(items).to_json();
    if (a.out.empty())
        std::cout << j.dump(2) << '\n';
    else
        write_json_file(a.out, j);
    return 0;
}

// ---- export-trainset ------------------------------------------------------

struct ExportArgs {
    std::vector<std::string> from;
    std::string out;
};

int run_export(const ExportArgs& a) {
    std::vector<TrainPair> pairs;
    for (const auto& dir : a.from) {
        const auto summary = read_json_file(fs::path(dir) / "segment.json");
        try {
            const int cls = summary.at("class_id").get<int>();
            for (const auto& iv : summary.at("intervals")) {
                for (int t = iv.at(0).get<int>(); t <= iv.at(1).get<int>(); ++t) {
                    TrainPair p;
                    p.attention = attention_from_tensor(read_tensor(fs::path(dir) / frame_name("attention", t, ".tnsr")));
                    p.mask = read_mask(fs::path(dir) / frame_name("mask", t, ".pgm"));
                    p.class_id = cls;
                    p.source = (fs::path(dir) / frame_name("frame", t, "")).string();
                    pairs.push_back(std::move(p));
                }
            }
        } catch (const nlohmann::json::exception& e) {
            throw InputError(dir + "/segment.json: " + e.what());
        }
    }
    const auto manifest = export_trainset(pairs, a.out);
    std::cout << manifest.at("pairs").size() << " pairs written to " << a.out << '\n';
    return 0;
}

// ---- gen-synthetic --------------------------------------------------------

struct SyntheticArgs {
    std::string out;
    SyntheticParams params;
    ConfigFlags config;
};

int run_synthetic(SyntheticArgs a) {
    const auto cfg = a.config.load();
    a.params.scales = cfg.attention.scales;
    write_synthetic_clip(make_synthetic_clip(a.params), a.out);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Weakly supervised video object segmentation by graph cut over superpixels."};
    app.require_subcommand(1);
    int code = 0;

    SegmentArgs seg;
    auto* c_seg = app.add_subcommand("segment", "Segment one or more video directories");
    c_seg->add_option("--input", seg.inputs,
                      "Video directory (repeatable): frame_%06d.ppm, flow_%06d.flo, att_/feat_*.tnsr, scores.json")
        ->required();
    c_seg->add_option("--class", seg.class_name, "Class name or index (needs scores.json for names)");
    c_seg->add_option("--out", seg.out, "Output directory; one subdirectory per input when several")->required();
    c_seg->add_option("--jobs", seg.jobs, "Videos processed in parallel (default: config jobs)");
    c_seg->add_flag("--allow-estimated-flow", seg.allow_estimated, "Block-match missing flow files instead of failing");
    c_seg->add_option("--dump-intermediates", seg.dump_intermediates, "Write superpixels, motion maps and GMMs here");
    c_seg->add_option("--dump-energy", seg.dump_energy, "Write the energy model of every solve here");
    seg.config.attach(c_seg);
    c_seg->callback([&] { code = run_segment(seg); });

    FilterArgs flt;
    auto* c_flt = app.add_subcommand("filter", "Relevant frame intervals for one class");
    c_flt->add_option("--scores", flt.scores, "scores.json with classes and per-frame scores")->required();
    c_flt->add_option("--class", flt.class_name, "Class name or index")->required();
    c_flt->add_option("--out", flt.out, "Output JSON (default: stdout)");
    flt.config.attach(c_flt);
    c_flt->callback([&] { code = run_filter(flt); });

    RetrieveArgs ret;
    auto* c_ret = app.add_subcommand("retrieve-sim", "Select clips from a scored video manifest");
    c_ret->add_option("--manifest", ret.manifest, "Corpus manifest JSON")->required();
    c_ret->add_option("--out", ret.out, "Output JSON (default: stdout)");
    ret.config.attach(c_ret);
    c_ret->callback([&] { code = run_retrieve(ret); });

    FuseArgs fus;
    auto* c_fus = app.add_subcommand("fuse", "Fuse per-class probability maps into a label map");
    c_fus->add_option("--map", fus.maps, "ID=probabilities.tnsr with ID in [1,254] (repeatable)")->required();
    c_fus->add_option("--out", fus.out, "Output P5 label map")->required();
    c_fus->add_option("--bg-threshold", fus.bg_threshold, "Background threshold (default: config)");
    fus.config.attach(c_fus);
    c_fus->callback([&] { code = run_fuse(fus); });

    EvalArgs ev;
    auto* c_ev = app.add_subcommand("eval", "Mean IoU over categories and videos");
    c_ev->add_option("--pairs", ev.pairs, "JSON {\"pairs\":[{video,class,pred,gt}]}, paths relative to the file");
    c_ev->add_option("--pred", ev.pred, "Directory of mask_%06d.pgm");
    c_ev->add_option("--gt", ev.gt, "Directory of gt_%06d.pgm (255 = void)");
    c_ev->add_option("--class", ev.class_id, "Class id for --pred/--gt mode");
    c_ev->add_option("--video", ev.video, "Video name for --pred/--gt mode");
    c_ev->add_option("--out", ev.out, "Output JSON (default: stdout)");
    c_ev->callback([&] { code = run_eval(ev); });

    ExportArgs ex;
    auto* c_ex = app.add_subcommand("export-trainset", "Export attention/mask pairs from segment outputs");
    c_ex->add_option("--from", ex.from, "segment output directory (repeatable)")->required();
    c_ex->add_option("--out", ex.out, "Output directory")->required();
    c_ex->callback([&] { code = run_export(ex); });

    SyntheticArgs syn;
    auto* c_syn = app.add_subcommand("gen-synthetic", "Write the synthetic disk clip with ground truth");
    c_syn->add_option("--out", syn.out, "Output directory")->required();
    c_syn->add_option("--frames", syn.params.frames, "Frame count");
    c_syn->add_option("--width", syn.params.width, "Frame width");
    c_syn->add_option("--height", syn.params.height, "Frame height");
    c_syn->add_option("--seed", syn.params.seed, "Background noise seed");
    syn.config.attach(c_syn);
    c_syn->callback([&] { code = run_synthetic(syn); });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    } catch (const InvariantError& e) {
        std::cerr << "internal error: " << e.what() << '\n';
        return 3;
    } catch (const InputError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return code;
}
