#include <functional>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "polsarkit/autodiff.hpp"
#include "polsarkit/bases.hpp"
#include "polsarkit/io.hpp"
#include "polsarkit/labelgen.hpp"
#include "polsarkit/polsar.hpp"
#include "polsarkit/pretrain.hpp"
#include "polsarkit/queries.hpp"
#include "polsarkit/version.hpp"
#include "polsarkit/yamaguchi.hpp"

using namespace polsar;

namespace {

// Every run writes <out>.manifest.json next to its primary output.
struct ManifestBuilder {
  io::RunManifest m;

  ManifestBuilder(const std::string& command, int argc, char** argv) {
    m.tool_version = kToolVersion;
    m.command = command;
    std::string joined;
    for (int i = 1; i < argc; ++i) {
      if (i > 1) joined += ' ';
      joined += argv[i];
    }
    m.config_hash = io::fnv1a(joined.data(), joined.size());
  }

  void input(const std::string& path) {
    m.inputs.emplace_back(path, io::fnv1a_file(path));
  }
  void output(const std::string& path) {
    m.outputs.emplace_back(path, io::fnv1a_file(path));
  }
  void finish(const std::string& out) {
    m.timestamp = io::manifest_timestamp();
    io::write_manifest(m, out + ".manifest.json");
  }
};

std::string json_line(const std::string& type, const std::string& code,
                      const std::string& message) {
  nlohmann::json j;
  j["error"]["type"] = type;
  if (!code.empty()) j["error"]["code"] = code;
  j["error"]["message"] = message;
  return j.dump();
}

// shortest decimal that parses back to the same double
std::string num(double v) { return nlohmann::json(v).dump(); }

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"polarimetric SAR decomposition and pretraining toolkit"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(kToolVersion));

  std::function<void()> job;

  // convert: enforce reciprocity on a raster
  {
    auto* cmd = app.add_subcommand(
        "convert", "symmetrize the cross-pol channels of a raster");
    auto input = std::make_shared<std::string>();
    auto out = std::make_shared<std::string>();
    cmd->add_option("input", *input, "input .cpxr raster")->required();
    cmd->add_option("--out", *out, "output .cpxr raster")->required();
    cmd->callback([&job, input, out, argc, argv] {
      job = [=] {
        ManifestBuilder mb("convert", argc, argv);
        mb.input(*input);
        PolsarRaster raster = io::read_cpxr(*input);
        for (auto& px : raster.pixels.cells) px = symmetrize_reciprocal(px);
        io::write_cpxr(raster, *out);
        mb.output(*out);
        mb.finish(*out);
      };
    });
  }

  // span
  {
    auto* cmd = app.add_subcommand("span", "total power image from a raster");
    auto input = std::make_shared<std::string>();
    auto out = std::make_shared<std::string>();
    cmd->add_option("input", *input, "input .cpxr raster")->required();
    cmd->add_option("--out", *out, "output .pspn plane")->required();
    cmd->callback([&job, input, out, argc, argv] {
      job = [=] {
        ManifestBuilder mb("span", argc, argv);
        mb.input(*input);
        io::write_span(span_raster(io::read_cpxr(*input)), *out);
        mb.output(*out);
        mb.finish(*out);
      };
    });
  }

  // decompose
  {
    auto* cmd = app.add_subcommand(
        "decompose", "four-component power stack from a raster");
    auto input = std::make_shared<std::string>();
    auto out = std::make_shared<std::string>();
    auto window = std::make_shared<int>(3);
    cmd->add_option("input", *input, "input .cpxr raster")->required();
    cmd->add_option("--out", *out, "output .pstk stack")->required();
    cmd->add_option("--window", *window, "odd boxcar window (default 3)");
    cmd->callback([&job, input, out, window, argc, argv] {
      job = [=] {
        ManifestBuilder mb("decompose", argc, argv);
        mb.input(*input);
        const PolsarRaster raster = io::read_cpxr(*input);
        io::write_stack(decompose_raster(boxcar_coherency(raster, *window)),
                        *out);
        mb.output(*out);
        mb.finish(*out);
      };
    });
  }

  // labels
  {
    auto* cmd = app.add_subcommand(
        "labels", "equiprobable binary masks from a power stack");
    auto input = std::make_shared<std::string>();
    auto out = std::make_shared<std::string>();
    cmd->add_option("input", *input, "input .pstk stack")->required();
    cmd->add_option("--out", *out, "output .pmsk masks")->required();
    cmd->callback([&job, input, out, argc, argv] {
      job = [=] {
        ManifestBuilder mb("labels", argc, argv);
        mb.input(*input);
        io::write_masks(generate_labels(io::read_stack(*input)), *out);
        mb.output(*out);
        mb.finish(*out);
      };
    });
  }

  // queries init | report
  {
    auto* cmd = app.add_subcommand("queries", "scattering query bank tools");
    cmd->require_subcommand(1);
    {
      auto* sub = cmd->add_subcommand("init", "build the shipped query bank");
      auto out = std::make_shared<std::string>();
      auto seed = std::make_shared<std::uint64_t>(kQuerySeed);
      auto pairs = std::make_shared<int>(kQuerySamplePairs);
      sub->add_option("--out", *out, "output .qrys bank")->required();
      sub->add_option("--seed", *seed, "sampling seed");
      sub->add_option("--pairs", *pairs, "probe pairs per basis");
      sub->callback([&job, out, seed, pairs, argc, argv] {
        job = [=] {
          ManifestBuilder mb("queries init", argc, argv);
          io::write_queries(shipped_queries(*seed, *pairs), *out);
          mb.output(*out);
          mb.finish(*out);
        };
      });
    }
    {
      auto* sub = cmd->add_subcommand("report", "pairwise cosine report");
      auto input = std::make_shared<std::string>();
      auto out = std::make_shared<std::string>();
      sub->add_option("input", *input, "input .qrys bank")->required();
      sub->add_option("--out", *out, "output JSON report")->required();
      sub->callback([&job, input, out, argc, argv] {
        job = [=] {
          ManifestBuilder mb("queries report", argc, argv);
          mb.input(*input);
          const auto queries = io::read_queries(*input);
          const IndependenceReport rep = independence_report(queries);
          nlohmann::json j;
          j["n"] = rep.n;
          for (const auto& q : queries) {
            j["kinds"].push_back(basis_name(q.kind));
          }
          for (int r = 0; r < rep.n; ++r) {
            nlohmann::json row = nlohmann::json::array();
            for (int c = 0; c < rep.n; ++c) row.push_back(rep.at(r, c));
            j["cosines"].push_back(row);
          }
          j["max_off_diag"] = rep.max_off_diag;
          io::write_text_file(*out, j.dump(2) + "\n");
          mb.output(*out);
          mb.finish(*out);
        };
      });
    }
  }

  // pretrain
  {
    auto* cmd = app.add_subcommand(
        "pretrain", "gradient-descent pretraining on one scene");
    auto scene = std::make_shared<std::string>();
    auto labels = std::make_shared<std::string>();
    auto span = std::make_shared<std::string>();
    auto config = std::make_shared<std::string>();
    auto out = std::make_shared<std::string>();
    auto seed = std::make_shared<std::uint64_t>(0);
    auto* seed_opt = cmd->add_option("--seed", *seed, "override config seed");
    cmd->add_option("scene", *scene, "input .cpxr raster")->required();
    cmd->add_option("--labels", *labels, "input .pmsk masks")->required();
    cmd->add_option("--span", *span, "input .pspn plane")->required();
    cmd->add_option("--config", *config, "training config")->required();
    cmd->add_option("--out", *out, "output .ckpt checkpoint")->required();
    cmd->callback([&job, scene, labels, span, config, out, seed, seed_opt, argc,
                   argv] {
      job = [=] {
        ManifestBuilder mb("pretrain", argc, argv);
        mb.input(*scene);
        mb.input(*labels);
        mb.input(*span);
        mb.input(*config);
        io::RunConfig cfg = io::read_config(*config);
        if (seed_opt->count() > 0) {
          cfg.encoder.seed = *seed;
          cfg.train.seed = *seed;
        }
        const PolsarRaster raster = io::read_cpxr(*scene);
        const BinaryLabelStack masks = io::read_masks(*labels);
        const RealGrid span_grid = io::read_span(*span);
        const TrainResult result =
            train(raster, masks, span_grid, cfg.encoder, cfg.train);

        io::write_checkpoint({result.params, cfg.encoder, cfg.train}, *out);
        const std::string trace_path = *out + ".trace.csv";
        std::string csv = "iter,total,yamaguchi,power\n";
        for (const auto& row : result.trace) {
          csv += std::to_string(row.iter) + "," + num(row.total) + "," +
                 num(row.yamaguchi) + "," + num(row.power) + "\n";
        }
        io::write_text_file(trace_path, csv);
        mb.output(*out);
        mb.output(trace_path);
        mb.finish(*out);
        std::cout << "final loss " << num(result.trace.back().total) << " after "
                  << result.trace.size() << " iterations\n";
      };
    });
  }

  // eval
  {
    auto* cmd = app.add_subcommand(
        "eval", "mask agreement metrics for a checkpoint");
    auto ckpt = std::make_shared<std::string>();
    auto scene = std::make_shared<std::string>();
    auto labels = std::make_shared<std::string>();
    auto out = std::make_shared<std::string>();
    cmd->add_option("ckpt", *ckpt, "input .ckpt checkpoint")->required();
    cmd->add_option("--scene", *scene, "input .cpxr raster")->required();
    cmd->add_option("--labels", *labels, "input .pmsk masks")->required();
    cmd->add_option("--out", *out, "output metrics JSON")->required();
    cmd->callback([&job, ckpt, scene, labels, out, argc, argv] {
      job = [=] {
        ManifestBuilder mb("eval", argc, argv);
        mb.input(*ckpt);
        mb.input(*scene);
        mb.input(*labels);
        const io::Checkpoint cp = io::read_checkpoint(*ckpt);
        const PolsarRaster raster = io::read_cpxr(*scene);
        const BinaryLabelStack masks = io::read_masks(*labels);

        const ad::Matrix input = patch_embed_input(raster, cp.ecfg.patch);
        const ad::Matrix labelsM = downsample_labels(masks, cp.ecfg.patch);
        const ad::Matrix spanM =
            downsample_span(span_raster(raster), cp.ecfg.patch);
        ad::Tape tape;
        std::vector<ad::Value> leaves;
        for (const auto& m : flatten_params(cp.params)) {
          leaves.push_back(tape.leaf(m));
        }
        const ForwardResult fwd =
            model_forward(tape, leaves, input, labelsM, spanM, cp.tcfg.alpha);
        const EvalMetrics metrics =
            eval_metrics(tape.value(fwd.yamaguchi_maps), labelsM);

        nlohmann::json j;
        for (int i = 0; i < kComponentCount; ++i) {
          const char* name = component_name(i);
          j["components"][name]["oa"] = metrics.oa[static_cast<std::size_t>(i)];
          j["components"][name]["miou"] = metrics.miou[static_cast<std::size_t>(i)];
          j["components"][name]["macc"] = metrics.macc[static_cast<std::size_t>(i)];
        }
        j["mean_oa"] = metrics.mean_oa();
        j["mean_miou"] = metrics.mean_miou();
        j["mean_macc"] = metrics.mean_macc();
        j["loss"]["total"] = tape.value(fwd.loss).at(0, 0);
        j["loss"]["yamaguchi"] = tape.value(fwd.loss_yamaguchi).at(0, 0);
        j["loss"]["power"] = tape.value(fwd.loss_power).at(0, 0);
        io::write_text_file(*out, j.dump(2) + "\n");
        mb.output(*out);
        mb.finish(*out);
        std::cout << "mean OA " << num(metrics.mean_oa()) << "%\n";
      };
    });
  }

  // composite
  {
    auto* cmd = app.add_subcommand("composite", "RGB quicklook image");
    auto input = std::make_shared<std::string>();
    auto out = std::make_shared<std::string>();
    auto mode = std::make_shared<std::string>("pauli");
    cmd->add_option("input", *input, "raster (pauli) or stack (yamaguchi)")
        ->required();
    cmd->add_option("--mode", *mode, "pauli | yamaguchi")
        ->check(CLI::IsMember({"pauli", "yamaguchi"}));
    cmd->add_option("--out", *out, "output .ppm image")->required();
    cmd->callback([&job, input, out, mode, argc, argv] {
      job = [=] {
        ManifestBuilder mb("composite", argc, argv);
        mb.input(*input);
        if (*mode == "pauli") {
          const PolsarRaster raster = io::read_cpxr(*input);
          io::write_ppm(*out, raster.pixels.height, raster.pixels.width,
                        io::composite_pauli(raster));
        } else {
          const ComponentStack stack = io::read_stack(*input);
          io::write_ppm(*out, stack.surface.height, stack.surface.width,
                        io::composite_yamaguchi(stack));
        }
        mb.output(*out);
        mb.finish(*out);
      };
    });
  }

  // synth
  {
    auto* cmd = app.add_subcommand(
        "synth", "speckled scene from a region description");
    auto spec_path = std::make_shared<std::string>();
    auto config = std::make_shared<std::string>();
    auto out = std::make_shared<std::string>();
    auto seed = std::make_shared<std::uint64_t>(0);
    auto* seed_opt = cmd->add_option("--seed", *seed, "speckle seed");
    auto* config_opt =
        cmd->add_option("--config", *config, "take the seed from a config file");
    cmd->add_option("--spec", *spec_path, "scene description JSON")->required();
    cmd->add_option("--out", *out, "output .cpxr raster")->required();
    cmd->callback([&job, spec_path, config, out, seed, seed_opt, config_opt,
                   argc, argv] {
      job = [=] {
        ManifestBuilder mb("synth", argc, argv);
        mb.input(*spec_path);
        std::uint64_t use_seed = 0;
        if (config_opt->count() > 0) {
          mb.input(*config);
          use_seed = io::read_config(*config).encoder.seed;
        }
        if (seed_opt->count() > 0) use_seed = *seed;
        const SceneSpec spec = io::read_scene_json(*spec_path);
        io::write_cpxr(synthesize_scene(spec, use_seed), *out);
        mb.output(*out);
        mb.finish(*out);
      };
    });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    job();
    return 0;
  } catch (const io::IoError& e) {
    std::cerr << json_line("io", io::io_error_name(e.code), e.what()) << "\n";
    return 1;
  } catch (const std::invalid_argument& e) {
    std::cerr << json_line("invalid_argument", "", e.what()) << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << json_line("runtime", "", e.what()) << "\n";
    return 1;
  }
}
