#include "wirefit/metrics.hpp"
#include "wirefit/pipeline.hpp"
#include "wirefit/point_cloud.hpp"
#include "wirefit/synthgen.hpp"
#include "wirefit/wireframe.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <string>

namespace {

// Exit codes beyond the usual 0/1/2:
//   10 no sharp features in the input cloud
//   11 no curve clusters after segmentation
//   12 file system / IO failure
//   13 malformed or invalid data
//   14 internal error
constexpr int kExitNoSharpFeatures = 10;
constexpr int kExitNoCurves = 11;
constexpr int kExitIo = 12;
constexpr int kExitFormat = 13;
constexpr int kExitInternal = 14;

struct ExtractOptions {
  std::string input;
  std::string output;
  std::string dump_weights;
  std::string dump_segmentation;
  std::string dump_graph;
  std::string manifest_path;
  wirefit::PipelineConfig config;
};

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path);
  if (!out) throw wirefit::Error("cannot open file for writing: " + path);
  out << content;
  if (!out) throw wirefit::Error("failed writing file: " + path);
}

void dump_weights_file(const std::string& path, const wirefit::PipelineResult& result) {
  std::ofstream out(path);
  if (!out) throw wirefit::Error("cannot open file for writing: " + path);
  char buf[200];
  for (size_t i = 0; i < result.skeleton.size(); ++i) {
    const wirefit::Vec3& p = result.skeleton.positions[i];
    std::snprintf(buf, sizeof(buf), "%.9g %.9g %.9g %.9g\n", p.x(), p.y(), p.z(),
                  result.weights[i]);
    out << buf;
  }
}

// One line per skeleton point: position plus segment id. Corner clusters come
// first (0-based), curve clusters follow, unassigned points get -1.
void dump_segmentation_file(const std::string& path,
                            const wirefit::PipelineResult& result) {
  std::vector<int> label(result.skeleton.size(), -1);
  int next = 0;
  for (const wirefit::CornerCluster& c : result.corner_clusters) {
    for (int idx : c.member_indices) label[idx] = next;
    ++next;
  }
  for (const wirefit::CurveCluster& c : result.curve_clusters) {
    for (int idx : c.member_indices) label[idx] = next;
    ++next;
  }
  std::ofstream out(path);
  if (!out) throw wirefit::Error("cannot open file for writing: " + path);
  char buf[200];
  for (size_t i = 0; i < result.skeleton.size(); ++i) {
    const wirefit::Vec3& p = result.skeleton.positions[i];
    std::snprintf(buf, sizeof(buf), "%.9g %.9g %.9g %d\n", p.x(), p.y(), p.z(),
                  label[i]);
    out << buf;
  }
}

void dump_graph_file(const std::string& path, const wirefit::PipelineResult& result) {
  nlohmann::json j;
  j["nodes"] = nlohmann::json::array();
  for (const wirefit::Vec3& n : result.graph.nodes) {
    j["nodes"].push_back({n.x(), n.y(), n.z()});
  }
  j["edges"] = nlohmann::json::array();
  for (const auto& e : result.graph.edges) j["edges"].push_back({e[0], e[1]});
  j["corner_nodes"] = wirefit::reconcile_corners(result.graph);
  write_text_file(path, j.dump(2) + "\n");
}

int run_extract(const ExtractOptions& opt) {
  const wirefit::PointCloudField cloud = wirefit::load_point_cloud(opt.input);
  const wirefit::PipelineResult result = wirefit::extract_wireframe(cloud, opt.config);

  wirefit::save_wireframe(result.wireframe, opt.output);
  if (!opt.dump_weights.empty()) dump_weights_file(opt.dump_weights, result);
  if (!opt.dump_segmentation.empty()) {
    dump_segmentation_file(opt.dump_segmentation, result);
  }
  if (!opt.dump_graph.empty()) dump_graph_file(opt.dump_graph, result);
  if (!opt.manifest_path.empty()) {
    write_text_file(opt.manifest_path, wirefit::manifest_to_json(result.manifest) + "\n");
  }

  std::cout << "extracted " << result.wireframe.corners.size() << " corners, "
            << result.wireframe.curves.size() << " curves -> " << opt.output << "\n";
  for (const std::string& w : result.manifest.warnings) {
    std::cerr << "warning: " << w << "\n";
  }
  return 0;
}

int run_evaluate_pair(const std::string& pred_path, const std::string& truth_path,
                      double spacing, const std::string& json_path) {
  const wirefit::Wireframe pred = wirefit::load_wireframe(pred_path);
  const wirefit::Wireframe truth = wirefit::load_wireframe(truth_path);
  const wirefit::EvaluationReport report =
      wirefit::evaluate_wireframes(pred, truth, spacing);
  if (!json_path.empty()) {
    write_text_file(json_path, wirefit::report_to_json(report) + "\n");
  }
  std::cout << wirefit::report_table_header()
            << wirefit::report_table_row(std::filesystem::path(pred_path).stem().string(),
                                         report);
  return 0;
}

int run_evaluate_batch(const std::string& dir, double spacing,
                       const std::string& json_path) {
  namespace fs = std::filesystem;
  std::vector<fs::path> truths;
  for (const auto& entry : fs::directory_iterator(dir)) {
    const std::string name = entry.path().filename().string();
    if (name.size() > 11 && name.ends_with(".truth.json")) {
      truths.push_back(entry.path());
    }
  }
  std::sort(truths.begin(), truths.end());
  if (truths.empty()) {
    throw wirefit::Error("no *.truth.json files in directory: " + dir);
  }

  nlohmann::json rows = nlohmann::json::array();
  std::string table = wirefit::report_table_header();
  int fails = 0;
  double cd_sum = 0.0, hd_sum = 0.0;
  int ok = 0;
  for (const fs::path& truth_path : truths) {
    std::string stem = truth_path.filename().string();
    stem.resize(stem.size() - std::string(".truth.json").size());
    const fs::path pred_path = truth_path.parent_path() / (stem + ".pred.json");
    const wirefit::Wireframe truth = wirefit::load_wireframe(truth_path.string());
    // A missing prediction is a pipeline fail for that shape, not a batch abort.
    wirefit::Wireframe pred;
    if (fs::exists(pred_path)) pred = wirefit::load_wireframe(pred_path.string());
    const wirefit::EvaluationReport report =
        wirefit::evaluate_wireframes(pred, truth, spacing);
    table += wirefit::report_table_row(stem, report);
    nlohmann::json row = nlohmann::json::parse(wirefit::report_to_json(report));
    row["name"] = stem;
    rows.push_back(row);
    if (report.failed) {
      ++fails;
    } else {
      cd_sum += report.chamfer;
      hd_sum += report.hausdorff;
      ++ok;
    }
  }
  const double fail_rate = static_cast<double>(fails) / static_cast<double>(truths.size());
  nlohmann::json summary;
  summary["shapes"] = rows;
  summary["mean_chamfer"] = ok > 0 ? cd_sum / ok : std::numeric_limits<double>::quiet_NaN();
  summary["mean_hausdorff"] = ok > 0 ? hd_sum / ok : std::numeric_limits<double>::quiet_NaN();
  summary["fail_rate"] = fail_rate;
  if (!json_path.empty()) write_text_file(json_path, summary.dump(2) + "\n");
  std::cout << table;
  char agg[160];
  std::snprintf(agg, sizeof(agg),
                "mean chamfer %.6f   mean hausdorff %.6f   fail %d/%zu (%.0f%%)\n",
                ok > 0 ? cd_sum / ok : 0.0, ok > 0 ? hd_sum / ok : 0.0, fails,
                truths.size(), 100.0 * fail_rate);
  std::cout << agg;
  return 0;
}

int run_synth(const std::string& shape_name, double r, double noise, std::uint64_t seed,
              const std::string& output, const std::string& truth_path) {
  const wirefit::SyntheticShape shape = wirefit::make_shape(shape_name);
  const wirefit::PointCloudField cloud = wirefit::sample_field(shape, r, noise, seed);
  wirefit::save_point_cloud(cloud, output);
  if (!truth_path.empty()) {
    wirefit::save_wireframe(shape.truth_wireframe(), truth_path);
  }
  std::cout << "sampled " << cloud.size() << " points of " << shape_name << " -> "
            << output << "\n";
  return 0;
}

int run_export(const std::string& input, const std::string& output, double spacing,
               const std::string& format) {
  const wirefit::Wireframe wf = wirefit::load_wireframe(input);
  std::ofstream out(output);
  if (!out) throw wirefit::Error("cannot open file for writing: " + output);
  if (format == "obj") {
    wirefit::export_obj(wf, spacing, out);
  } else if (format == "xyzd") {
    wirefit::export_xyzd_samples(wf, spacing, out);
  } else {
    throw wirefit::ValidationError("unknown export format: " + format);
  }
  if (!out) throw wirefit::Error("failed writing file: " + output);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"wirefit: parametric wireframes from distance-annotated point clouds"};
  app.require_subcommand(1);

  int threads = 0;
  app.add_option("--threads", threads, "Worker thread count (overrides WIREFIT_THREADS)");

  // extract
  ExtractOptions ext;
  CLI::App* extract = app.add_subcommand("extract", "Point cloud -> wireframe JSON");
  extract->add_option("input", ext.input, "Input .xyzd point cloud")->required();
  extract->add_option("-o,--output", ext.output, "Output wireframe JSON")->required();
  extract->set_config("--config", "", "Config file with key=value lines");
  extract->add_option("--r", ext.config.r, "Sampling distance (default: from input)");
  extract->add_option("--t-dist", ext.config.t_dist_factor, "Skeleton threshold, in r");
  extract->add_option("--r-corner", ext.config.r_corner_factor,
                      "PCA neighborhood radius, in r");
  extract->add_option("--t-variance", ext.config.t_variance,
                      "Corner threshold on the middle variance ratio");
  extract->add_option("--t-corner", ext.config.t_corner, "Cornerness weight threshold");
  extract->add_option("--fps-ratio", ext.config.fps_ratio,
                      "Neighborhood center subsample ratio");
  extract->add_option("--merge-radius", ext.config.merge_radius_factor,
                      "Corner cluster linkage radius, in r");
  extract->add_option("--connect-radius", ext.config.connect_radius_factor,
                      "Curve proximity graph radius, in r");
  extract->add_option("--min-cluster-size", ext.config.min_cluster_size,
                      "Minimum curve cluster size");
  extract->add_option("--endpoint-radius", ext.config.endpoint_radius_factor,
                      "One-sidedness neighborhood radius, in r");
  extract->add_option("--v-open", ext.config.v_open_threshold,
                      "Open-curve threshold on |V|");
  extract->add_option("--t-split", ext.config.t_split_factor,
                      "Subdivision residual threshold, in r");
  extract->add_option("--max-depth", ext.config.max_subdivision_depth,
                      "Maximum subdivision rounds per cluster");
  extract->add_option("--attach-radius", ext.config.attach_radius_factor,
                      "Endpoint-to-corner snap radius, in r");
  extract->add_option("--node-iters", ext.config.node_opt_iterations,
                      "Graph node optimization iterations");
  extract->add_option("--ctrl-iters", ext.config.ctrl_opt_iterations,
                      "Control point optimization iterations");
  extract->add_option("--degree", ext.config.spline_degree, "Spline degree");
  extract->add_option("--dump-weights", ext.dump_weights,
                      "Write per-skeleton-point cornerness weights (x y z w)");
  extract->add_option("--dump-segmentation", ext.dump_segmentation,
                      "Write per-skeleton-point segment ids (x y z id)");
  extract->add_option("--dump-graph", ext.dump_graph, "Write topology graph JSON");
  extract->add_option("--manifest", ext.manifest_path, "Write run manifest JSON");

  // evaluate
  std::string eval_pred, eval_truth, eval_batch, eval_json;
  double eval_spacing = 0.01;
  CLI::App* evaluate = app.add_subcommand("evaluate", "Compare two wireframe JSONs");
  evaluate->add_option("prediction", eval_pred, "Predicted wireframe JSON");
  evaluate->add_option("reference", eval_truth, "Reference wireframe JSON");
  evaluate->add_option("--batch", eval_batch,
                       "Directory of <stem>.pred.json/<stem>.truth.json pairs");
  evaluate->add_option("--spacing", eval_spacing, "Curve sample spacing");
  evaluate->add_option("--json", eval_json, "Write the report as JSON");

  // synth
  std::string synth_shape, synth_out, synth_truth;
  double synth_r = 0.02, synth_noise = 0.0;
  std::uint64_t synth_seed = 1;
  CLI::App* synth = app.add_subcommand("synth", "Generate a synthetic point cloud");
  synth->add_option("--shape", synth_shape, "Preset name (see --list)")->required();
  synth->add_option("-o,--output", synth_out, "Output .xyzd path")->required();
  synth->add_option("--r", synth_r, "Sampling distance");
  synth->add_option("--noise", synth_noise, "Gaussian position noise sigma");
  synth->add_option("--seed", synth_seed, "RNG seed");
  synth->add_option("--truth", synth_truth, "Also write the ground-truth wireframe");

  // export
  std::string export_in, export_out, export_format = "obj";
  double export_spacing = 0.005;
  CLI::App* exporter = app.add_subcommand("export", "Wireframe JSON -> OBJ/XYZD");
  exporter->add_option("input", export_in, "Input wireframe JSON")->required();
  exporter->add_option("-o,--output", export_out, "Output path")->required();
  exporter->add_option("--spacing", export_spacing, "Curve sample spacing");
  exporter->add_option("--format", export_format, "obj or xyzd");

  // list shapes
  CLI::App* list = app.add_subcommand("shapes", "List synthetic shape presets");

  CLI11_PARSE(app, argc, argv);

  if (threads > 0) {
    setenv("WIREFIT_THREADS", std::to_string(threads).c_str(), 1);
  }

  try {
    if (*extract) return run_extract(ext);
    if (*evaluate) {
      if (!eval_batch.empty()) {
        if (!eval_pred.empty() || !eval_truth.empty()) {
          throw wirefit::ValidationError("--batch excludes positional arguments");
        }
        return run_evaluate_batch(eval_batch, eval_spacing, eval_json);
      }
      if (eval_pred.empty() || eval_truth.empty()) {
        throw wirefit::ValidationError("evaluate needs prediction and reference paths");
      }
      return run_evaluate_pair(eval_pred, eval_truth, eval_spacing, eval_json);
    }
    if (*synth) {
      return run_synth(synth_shape, synth_r, synth_noise, synth_seed, synth_out,
                       synth_truth);
    }
    if (*exporter) {
      return run_export(export_in, export_out, export_spacing, export_format);
    }
    if (*list) {
      for (const std::string& name : wirefit::shape_names()) std::cout << name << "\n";
      return 0;
    }
  } catch (const wirefit::PipelineError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return e.fail() == wirefit::PipelineError::Fail::no_sharp_features
               ? kExitNoSharpFeatures
               : kExitNoCurves;
  } catch (const wirefit::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitFormat;
  } catch (const wirefit::ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitFormat;
  } catch (const wirefit::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitIo;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return kExitInternal;
  }
  return 0;
}
