#include "vidcut/pipeline.hpp"

#include "vidcut/appearance.hpp"
#include "vidcut/error.hpp"
#include "vidcut/flow.hpp"
#include "vidcut/motion.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>

namespace vidcut {

namespace fs = std::filesystem;

std::string frame_name(const char* prefix, int index, const char* ext) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%s_%06d%s", prefix, index, ext);
    return buf;
}

namespace {

template <class F>
auto at_frame(int t, F&& f) -> decltype(f()) {
    try {
        return f();
    } catch (const InvariantError& e) {
        throw InvariantError("frame " + std::to_string(t) + ": " + e.what());
    } catch (const InputError& e) {
        throw InputError("frame " + std::to_string(t) + ": " + e.what());
    }
}

void check_inputs(const VideoInputs& in) {
    if (in.frames.empty()) throw InputError("segment: no frames");
    const int w = in.frames[0].width, h = in.frames[0].height;
    for (std::size_t t = 0; t < in.frames.size(); ++t)
        if (in.frames[t].width != w || in.frames[t].height != h)
            throw InputError("segment: frame " + std::to_string(t) + " size differs from frame 0");
    if (in.attention.size() != in.frames.size()) throw InputError("segment: attention count differs from frame count");
    for (std::size_t t = 0; t < in.attention.size(); ++t)
        if (in.attention[t].empty()) throw InputError("segment: frame " + std::to_string(t) + " has no attention map");
    if (in.flows.size() + 1 != in.frames.size())
        throw InputError("segment: need one flow field per consecutive frame pair");
    for (std::size_t t = 0; t < in.flows.size(); ++t)
        if (in.flows[t].width != w || in.flows[t].height != h)
            throw InputError("segment: flow " + std::to_string(t) + " size differs from frames");
    if (in.scores && in.scores->frames.size() != in.frames.size())
        throw InputError("segment: score count differs from frame count");
}

void solve_interval(const VideoInputs& in, const PipelineConfig& cfg, const DumpOptions& dump,
                    const RelevantInterval& iv, SegmentResult& out) {
    const int s = iv.start_frame;
    const int n = iv.length();
    const int w = in.frames[0].width, h = in.frames[0].height;

    std::vector<SuperpixelPartition> parts;
    std::vector<double> A, M;
    parts.reserve(n);
    for (int k = 0; k < n; ++k) {
        const int t = s + k;
        at_frame(t, [&] {
            parts.push_back(slic(in.frames[t], cfg.slic));
            out.attention[t] = fuse_multiscale(in.attention[t], w, h);
            const auto a = superpixel_attention(out.attention[t], parts.back());
            A.insert(A.end(), a.begin(), a.end());
        });
    }

    std::vector<FlowCorrespondence> links;
    for (int k = 0; k + 1 < n; ++k)
        links.push_back(at_frame(s + k, [&] { return flow_links(parts[k], parts[k + 1], in.flows[s + k]); }));

    std::vector<InsideOutsideMap> ioms;
    for (int k = 0; k < n; ++k) {
        const int t = s + k;
        // frame t uses its forward flow; the last frame of a clip reuses the previous pair
        const int flow_index = k + 1 < n ? t : (n > 1 ? t - 1 : -1);
        if (flow_index < 0) {
            out.warnings.push_back("frame " + std::to_string(t) + ": single-frame clip, motion term set to 0.5");
            M.insert(M.end(), parts[k].count(), 0.5);
            continue;
        }
        at_frame(t, [&] {
            ioms.push_back(inside_outside(motion_boundary(in.flows[flow_index], cfg.motion)));
            const auto m = motion_term(ioms.back(), parts[k]);
            M.insert(M.end(), m.begin(), m.end());
        });
    }

    // appearance models over region mean colors of the whole clip
    std::vector<Rgb> colors;
    std::vector<double> fg_w, bg_w;
    {
        std::size_t node = 0;
        for (const auto& p : parts) {
            for (const auto& r : p.regions) {
                colors.push_back(r.mean_rgb);
                const double a = A[node++];
                const bool fg = a > cfg.appearance.attention_threshold;
                fg_w.push_back(fg ? a : 0.0);
                bg_w.push_back(fg ? 0.0 : 1.0 - a);
            }
        }
    }
    const bool fg_any = std::any_of(fg_w.begin(), fg_w.end(), [](double v) { return v > 0.0; });
    const bool bg_any = std::any_of(bg_w.begin(), bg_w.end(), [](double v) { return v > 0.0; });
    std::vector<double> C(colors.size(), 0.5);
    std::optional<GmmFit> fg_fit, bg_fit;
    if (fg_any && bg_any) {
        fg_fit = fit_weighted_gmm(colors, fg_w, cfg.appearance.gmm);
        bg_fit = fit_weighted_gmm(colors, bg_w, cfg.appearance.gmm);
        for (const auto* f : {&*fg_fit, &*bg_fit})
            if (!f->warning.empty()) out.warnings.push_back(f->warning);
        std::size_t node = 0;
        for (const auto& p : parts) {
            const auto c = appearance_term(fg_fit->model, bg_fit->model, p);
            std::copy(c.begin(), c.end(), C.begin() + static_cast<std::ptrdiff_t>(node));
            node += c.size();
        }
    } else {
        out.warnings.push_back("frames " + std::to_string(s) + "-" + std::to_string(iv.end_frame) +
                               ": no " + (fg_any ? "background" : "foreground") +
                               " samples for the appearance model, appearance term set to 0.5");
    }

    const auto graph = build_graph(parts, links);
    const auto model = assemble_energy(graph, A, M, C, cfg.energy);
    const auto labeling = min_cut(model);
    const double recomputed = compute_energy(model, labeling.labels);
    if (std::abs(recomputed - labeling.energy) > 1e-9 * std::max(1.0, std::abs(recomputed)))
        throw InvariantError("min_cut reported energy " + std::to_string(labeling.energy) +
                             " but the labeling evaluates to " + std::to_string(recomputed));

    auto masks = labeling_to_masks(labeling, graph, parts);
    for (int k = 0; k < n; ++k) out.masks[s + k] = std::move(masks[k]);

    SolveSummary summary;
    summary.interval = iv;
    summary.nodes = graph.nodes.size();
    summary.spatial_edges = graph.spatial.size();
    summary.temporal_edges = graph.temporal.size();
    summary.energy = labeling.energy;
    summary.recomputed_energy = recomputed;
    summary.foreground_nodes = static_cast<std::size_t>(std::count(labeling.labels.begin(), labeling.labels.end(), 1));
    out.solves.push_back(summary);

    const std::string tag = std::to_string(s) + "_" + std::to_string(iv.end_frame);
    if (!dump.intermediates_dir.empty()) {
        const auto dir = dump.intermediates_dir / ("interval_" + tag);
        fs::create_directories(dir);
        for (int k = 0; k < n; ++k) {
            const int t = s + k;
            write_file(dir / frame_name("superpixels", t, ".pgm"), encode_netpbm16(partition_to_image16(parts[k])));
            write_json_file(dir / frame_name("superpixels", t, ".json"), partition_stats_json(parts[k]));
            if (static_cast<std::size_t>(k) < ioms.size())
                write_tensor(dir / frame_name("inside_outside", t, ".tnsr"), inside_outside_to_tensor(ioms[k]));
        }
        nlohmann::json gmm = {{"foreground", nullptr}, {"background", nullptr}};
        if (fg_fit) gmm["foreground"] = fg_fit->model.to_json();
        if (bg_fit) gmm["background"] = bg_fit->model.to_json();
        write_json_file(dir / "gmm.json", gmm);
    }
    if (!dump.energy_dir.empty()) {
        fs::create_directories(dump.energy_dir);
        auto j = model.to_json();
        j["interval"] = {s, iv.end_frame};
        j["params"] = {{"lambda_a", cfg.energy.lambda_a},
                       {"lambda_m", cfg.energy.lambda_m},
                       {"lambda_c", cfg.energy.lambda_c},
                       {"epsilon", cfg.energy.epsilon},
                       {"gamma", cfg.energy.gamma}};
        j["nodes"] = nlohmann::json::array();
        for (const auto& node : graph.nodes) j["nodes"].push_back({node.frame + s, node.region});
        j["labels"] = labeling.labels;
        j["energy"] = labeling.energy;
        write_json_file(dump.energy_dir / ("energy_" + tag + ".json"), j);
    }
}

}  // namespace

SegmentResult segment_video(const VideoInputs& in, const PipelineConfig& cfg, const DumpOptions& dump) {
    cfg.validate();
    check_inputs(in);
    const int T = static_cast<int>(in.frames.size());
    const int w = in.frames[0].width, h = in.frames[0].height;

    SegmentResult out;
    out.masks.assign(T, SegmentationMask(w, h, 0));
    out.attention.assign(T, AttentionMap(w, h, 0.0f));
    if (in.scores)
        out.intervals =
            relevance_filter(*in.scores, in.class_id, cfg.attention.relevance_threshold, cfg.attention.min_run);
    else
        out.intervals = {{0, T - 1, in.class_id}};

    for (const auto& iv : out.intervals) solve_interval(in, cfg, dump, iv, out);
    return out;
}

nlohmann::json SegmentResult::summary_json() const {
    nlohmann::json iv = nlohmann::json::array();
    for (const auto& i : intervals) iv.push_back({i.start_frame, i.end_frame});
    nlohmann::json solves_json = nlohmann::json::array();
    for (const auto& s : solves)
        solves_json.push_back({{"interval", {s.interval.start_frame, s.interval.end_frame}},
                               {"nodes", s.nodes},
                               {"spatial_edges", s.spatial_edges},
                               {"temporal_edges", s.temporal_edges},
                               {"energy", s.energy},
                               {"recomputed_energy", s.recomputed_energy},
                               {"foreground_nodes", s.foreground_nodes}});
    const int cls = intervals.empty() ? 0 : intervals.front().class_id;
    return {{"frames", masks.size()}, {"class_id", cls}, {"intervals", iv}, {"solves", solves_json},
            {"warnings", warnings}};
}

VideoInputs load_video_dir(const fs::path& dir, const std::string& class_name, const PipelineConfig& config,
                           std::vector<std::string>* warnings) {
    if (!fs::is_directory(dir)) throw InputError("not a directory: " + dir.string());
    auto warn = [&](const std::string& msg) {
        if (warnings) warnings->push_back(msg);
    };

    VideoInputs in;
    for (int t = 0;; ++t) {
        fs::path p = dir / frame_name("frame", t, ".ppm");
        if (!fs::exists(p)) p = dir / frame_name("frame", t, ".pgm");
        if (!fs::exists(p)) break;
        in.frames.push_back(read_netpbm(p));
    }
    if (in.frames.empty()) throw InputError(dir.string() + ": no frame_000000.ppm");
    const int T = static_cast<int>(in.frames.size());

    if (fs::exists(dir / "scores.json")) {
        in.scores = ClassScores::from_json(read_json_file(dir / "scores.json"));
        in.class_id = in.scores->class_index(class_name);
        if (static_cast<int>(in.scores->frames.size()) != T)
            throw InputError(dir.string() + ": scores.json covers " + std::to_string(in.scores->frames.size()) +
                             " frames but " + std::to_string(T) + " frames were found");
    } else {
        try {
            in.class_id = class_name.empty() ? 0 : std::stoi(class_name);
        } catch (const std::exception&) {
            throw InputError("class '" + class_name + "' needs scores.json to resolve a name; pass a numeric id");
        }
    }

    // per-frame files for one prefix: plain name first, then _s0, _s1, ...
    auto scale_files = [&](const char* prefix, int t) {
        std::vector<fs::path> files;
        const auto plain = dir / frame_name(prefix, t, ".tnsr");
        if (fs::exists(plain)) files.push_back(plain);
        for (int k = 0;; ++k) {
            const auto p = dir / (frame_name(prefix, t, "") + "_s" + std::to_string(k) + ".tnsr");
            if (!fs::exists(p)) break;
            files.push_back(p);
        }
        return files;
    };

    const bool direct = !scale_files("att", 0).empty();
    std::optional<Tensor> weights;
    if (!direct) {
        if (!fs::exists(dir / "weights.tnsr"))
            throw InputError(dir.string() + ": need att_*.tnsr or feat_*.tnsr with weights.tnsr");
        weights = read_tensor(dir / "weights.tnsr");
    }
    for (int t = 0; t < T; ++t) {
        const auto files = scale_files(direct ? "att" : "feat", t);
        if (files.empty()) throw InputError(dir.string() + ": missing attention/features for frame " + std::to_string(t));
        if (t == 0 && files.size() != config.attention.scales.size())
            warn("frame 0 provides " + std::to_string(files.size()) + " attention scale(s); config lists " +
                 std::to_string(config.attention.scales.size()));
        std::vector<AttentionMap> maps;
        for (const auto& f : files) {
            const auto tensor = read_tensor(f);
            maps.push_back(at_frame(t, [&] {
                return direct ? attention_from_tensor(tensor) : cam(tensor, *weights, in.class_id);
            }));
        }
        in.attention.push_back(std::move(maps));
    }

    for (int t = 0; t + 1 < T; ++t) {
        const auto p = dir / frame_name("flow", t, ".flo");
        if (fs::exists(p)) {
            in.flows.push_back(read_flo(p));
        } else if (config.flow.allow_estimated) {
            warn("estimated flow for frame pair " + std::to_string(t) + " by block matching");
            in.flows.push_back(estimate_flow_blockmatch(in.frames[t], in.frames[t + 1], config.flow.block,
                                                        config.flow.radius));
        } else {
            throw InputError(p.string() + " is missing (use --allow-estimated-flow to estimate it)");
        }
    }
    return in;
}

Image fuse_labels(std::span<const AttentionMap> probabilities, std::span<const int> class_ids, double bg_threshold) {
    if (probabilities.empty()) throw InputError("fuse_labels: empty class set");
    if (probabilities.size() != class_ids.size()) throw InputError("fuse_labels: one class id per map required");
    const int w = probabilities[0].width, h = probabilities[0].height;
    for (std::size_t c = 0; c < probabilities.size(); ++c) {
        if (probabilities[c].width != w || probabilities[c].height != h) throw InputError("fuse_labels: size mismatch");
        if (class_ids[c] < 1 || class_ids[c] > 254) throw InputError("fuse_labels: class ids must be in [1, 254]");
        for (float v : probabilities[c].values)
            if (!(v >= 0.0f && v <= 1.0f)) throw InputError("fuse_labels: probabilities must be in [0,1]");
    }
    Image out(w, h, 1);
    for (std::size_t i = 0; i < out.data.size(); ++i) {
        float best = -1.0f;
        int best_id = 0;
        for (std::size_t c = 0; c < probabilities.size(); ++c) {
            const float v = probabilities[c].values[i];
            if (v > best || (v == best && class_ids[c] < best_id)) {
                best = v;
                best_id = class_ids[c];
            }
        }
        out.data[i] = static_cast<std::uint8_t>(best < bg_threshold ? 0 : best_id);
    }
    return out;
}

double IouCounts::iou() const {
    const auto denom = tp + fp + fn;
    return denom ? static_cast<double>(tp) / static_cast<double>(denom) : 1.0;
}

IouCounts& IouCounts::operator+=(const IouCounts& o) {
    tp += o.tp;
    fp += o.fp;
    fn += o.fn;
    gt_pixels += o.gt_pixels;
    return *this;
}

IouCounts count_iou(const Image& prediction, const Image& ground_truth) {
    if (prediction.width != ground_truth.width || prediction.height != ground_truth.height)
        throw InputError("evaluate: prediction and ground truth sizes differ");
    if (prediction.channels != 1 || ground_truth.channels != 1)
        throw InputError("evaluate: masks must be single-channel");
    IouCounts c;
    for (std::size_t i = 0; i < prediction.data.size(); ++i) {
        const auto g = ground_truth.data[i];
        if (g == 255) continue;
        const bool gt = g != 0;
        const bool pr = prediction.data[i] != 0;
        c.tp += gt && pr;
        c.fp += !gt && pr;
        c.fn += gt && !pr;
        c.gt_pixels += gt;
    }
    return c;
}

EvalReport evaluate_miou(std::span<const EvalItem> items) {
    std::map<int, IouCounts> per_class;
    std::vector<EvalReport::VideoRow> videos;
    std::map<std::pair<std::string, int>, std::size_t> video_index;
    for (std::size_t i = 0; i < items.size(); ++i) {
        const auto& item = items[i];
        IouCounts c;
        try {
            c = count_iou(item.prediction, item.ground_truth);
        } catch (const InputError& e) {
            throw InputError("item " + std::to_string(i) + " (" + item.video + "): " + e.what());
        }
        per_class[item.class_id] += c;
        auto [it, inserted] = video_index.try_emplace({item.video, item.class_id}, videos.size());
        if (inserted) videos.push_back({item.video, item.class_id, {}, 0.0});
        videos[it->second].counts += c;
    }

    EvalReport r;
    double sum = 0.0;
    int used = 0;
    for (const auto& [id, counts] : per_class) {
        r.classes.push_back({id, counts, counts.iou()});
        if (counts.gt_pixels > 0) {
            sum += counts.iou();
            ++used;
        }
    }
    r.class_mean_iou = used ? sum / used : 0.0;
    sum = 0.0;
    used = 0;
    for (auto& v : videos) {
        v.iou = v.counts.iou();
        if (v.counts.gt_pixels > 0) {
            sum += v.iou;
            ++used;
        }
    }
    r.video_mean_iou = used ? sum / used : 0.0;
    r.videos = std::move(videos);
    return r;
}

nlohmann::json EvalReport::to_json() const {
    auto counts_json = [](const IouCounts& c) {
        return nlohmann::json{{"tp", c.tp}, {"fp", c.fp}, {"fn", c.fn}, {"gt_pixels", c.gt_pixels}};
    };
    nlohmann::json cls = nlohmann::json::array();
    for (const auto& c : classes) cls.push_back({{"class", c.class_id}, {"iou", c.iou}, {"counts", counts_json(c.counts)}});
    nlohmann::json vids = nlohmann::json::array();
    for (const auto& v : videos)
        vids.push_back({{"video", v.video}, {"class", v.class_id}, {"iou", v.iou}, {"counts", counts_json(v.counts)}});
    return {{"class_mean_iou", class_mean_iou}, {"video_mean_iou", video_mean_iou}, {"classes", cls}, {"videos", vids}};
}

nlohmann::json export_trainset(std::span<const TrainPair> pairs, const fs::path& out_dir) {
    fs::create_directories(out_dir);
    nlohmann::json list = nlohmann::json::array();
    for (std::size_t i = 0; i < pairs.size(); ++i) {
        const auto& p = pairs[i];
        if (p.attention.width != p.mask.width || p.attention.height != p.mask.height)
            throw InputError("export_trainset: pair " + std::to_string(i) + " attention/mask size mismatch");
        const auto att = frame_name("pair", static_cast<int>(i), "_att.tnsr");
        const auto mask = frame_name("pair", static_cast<int>(i), "_mask.pgm");
        write_tensor(out_dir / att, attention_to_tensor(p.attention));
        write_mask(out_dir / mask, p.mask);
        list.push_back({{"attention", att}, {"mask", mask}, {"class", p.class_id}, {"source", p.source}});
    }
    nlohmann::json manifest = {{"pairs", list}};
    write_json_file(out_dir / "manifest.json", manifest);
    return manifest;
}

}  // namespace vidcut
