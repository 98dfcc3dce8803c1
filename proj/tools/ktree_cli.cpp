#include <cstdio>
#include <map>
#include <memory>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "ktree/ktree.h"

namespace {

using Experiment = std::unique_ptr<kt_experiment, decltype(&kt_experiment_destroy)>;

int report_error(kt_status status, const std::string& context) {
  std::fprintf(stderr, "error: %s: %s\n", context.c_str(), kt_last_error());
  return kt_exit_code(status);
}

std::string subcommand_list() {
  std::string out;
  for (size_t i = 0; i < kt_subcommand_count(); ++i) out += (i ? ", " : "") + std::string(kt_subcommand_name(i));
  return out;
}

void print_checks(const kt_experiment* exp) {
  for (size_t i = 0; i < kt_experiment_check_count(exp); ++i) {
    const char* tag = kt_experiment_check_passed(exp, i) ? "PASS" : kt_experiment_check_informational(exp, i) ? "INFO" : "FAIL";
    std::printf("%s %s: %s\n", tag, kt_experiment_check_name(exp, i), kt_experiment_check_detail(exp, i));
  }
}

void print_window(kt_experiment* exp) {
  const auto doc = nlohmann::json::parse(kt_experiment_report_json(exp));
  const auto& s = doc.at("summary");
  std::printf("window [%s, %s] verdict %s\n", s.at("window_lo").dump().c_str(), s.at("window_hi").dump().c_str(),
              s.at("verdict").get<std::string>().c_str());
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Spherical maximal operators and weight classes on k-ary trees"};
  app.set_version_flag("--version", "ktree 1.0");

  std::string subcommand;
  app.add_option("subcommand", subcommand, "One of: " + subcommand_list())->required();
  std::string config_path;
  app.add_option("--config", config_path, "JSON configuration file; flags override its values");

  std::map<std::string, std::string> overrides;
  for (size_t i = 0; i < kt_config_field_count(); ++i) {
    const std::string name = kt_config_field_name(i);
    const std::string help = std::string(kt_config_field_help(i)) + " (default " + kt_config_field_default(i) + ")";
    app.add_option_function<std::string>(
        "--" + name, [&overrides, name](const std::string& v) { overrides[name] = v; }, help);
  }

  CLI11_PARSE(app, argc, argv);

  kt_experiment* raw = nullptr;
  if (const kt_status s = kt_experiment_create(&raw); s != KT_OK) return report_error(s, "startup");
  Experiment exp(raw, &kt_experiment_destroy);

  if (!config_path.empty())
    if (const kt_status s = kt_experiment_load_file(exp.get(), config_path.c_str()); s != KT_OK)
      return report_error(s, "config");
  for (const auto& [name, value] : overrides)
    if (const kt_status s = kt_experiment_set(exp.get(), name.c_str(), value.c_str()); s != KT_OK)
      return report_error(s, "config");

  if (const kt_status s = kt_experiment_run(exp.get(), subcommand.c_str()); s != KT_OK)
    return report_error(s, subcommand);

  print_checks(exp.get());
  if (subcommand == "certify") print_window(exp.get());
  if (const kt_status s = kt_experiment_write(exp.get()); s != KT_OK) return report_error(s, "output");

  if (!kt_experiment_passed(exp.get())) {
    std::printf("first failing assertion: %s\n", kt_experiment_first_failure(exp.get()));
    return kt_exit_code(KT_ASSERTION_FAILED);
  }
  return 0;
}
