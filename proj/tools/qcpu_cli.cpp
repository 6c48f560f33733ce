// Command-line front end for the toolchain: assemble, disassemble, run,
// compile, check and size programs. All file formats are line-oriented text.
//
// Exit codes: 0 success, 2 user error (parse/width/grammar), 3 memory guard.

#include <cstdio>
#include <exception>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "qcpu/qcpu.hpp"

namespace {

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw qcpu::ParseError("cannot open " + path);
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out)
        throw qcpu::ParseError("cannot write " + path);
    out << content;
}

struct RunOptions {
    std::string program_path;
    std::string state_path;
    std::string out_path;
    std::string trace_path;
    std::string mode = "one";
    std::uint64_t seed = 0;
    bool zero = false;
};

int cmd_asm(const std::string& in_path, const std::string& out_path) {
    const qcpu::Program program = qcpu::parse_program(read_file(in_path));
    std::string out;
    for (const qcpu::Instruction& instr : program.instructions)
        out += qcpu::encode(instr, program.config) + "\n";
    write_file(out_path, out);
    return 0;
}

int cmd_disasm(const std::string& in_path, const std::string& out_path, int n, int m) {
    const qcpu::QcpuConfig config(n, m);
    qcpu::Program program{config, {}};
    const std::string text = read_file(in_path);
    for (const auto& line : qcpu::detail::significant_lines(text)) {
        if (line.tokens.size() != 1)
            throw qcpu::ParseError("expected one bit list per line", line.number);
        try {
            program.instructions.push_back(qcpu::decode(line.tokens[0], config));
        } catch (const qcpu::ParseError& e) {
            if (e.line())
                throw;
            throw qcpu::ParseError(e.what(), line.number);
        }
    }
    write_file(out_path, qcpu::emit_asm(program));
    return 0;
}

int cmd_run(const RunOptions& options) {
    const qcpu::Program program = qcpu::parse_program(read_file(options.program_path));
    const qcpu::QcpuConfig config = program.config;

    qcpu::Statevector data = options.zero
                                 ? qcpu::Statevector::zero(config.n)
                                 : qcpu::read_statevector(read_file(options.state_path));

    qcpu::Statevector final_state;
    qcpu::RunTrace trace;
    if (options.mode == "one") {
        auto [state, t] = qcpu::run_mode_one(config, program, data);
        final_state = std::move(state);
        trace = std::move(t);
    } else if (options.mode == "hybrid") {
        final_state = qcpu::run_hybrid(config, program, data, &trace);
    } else if (options.mode == "two") {
        if (program.instructions.empty())
            throw qcpu::ParseError("mode two needs at least one instruction");
        std::vector<qcpu::ProgramState> states;
        states.reserve(program.instructions.size());
        for (const qcpu::Instruction& instr : program.instructions)
            states.push_back(qcpu::ProgramState::basis(config, instr));
        final_state = qcpu::run_mode_two(config, states, data, &trace);
    } else {
        throw qcpu::ParseError("unknown mode '" + options.mode + "'");
    }

    write_file(options.out_path, qcpu::write_statevector(final_state));
    if (!options.trace_path.empty())
        write_file(options.trace_path, qcpu::write_trace(trace));
    return 0;
}

int cmd_compile(const std::string& in_path, const std::string& out_path,
                const std::string& report_path, int n, std::optional<int> m,
                std::optional<double> epsilon) {
    const std::vector<qcpu::AbstractGate> gates =
        qcpu::parse_circuit(read_file(in_path), n);

    int m_value;
    if (m) {
        m_value = *m;
    } else {
        const double estimate =
            gates.empty() ? 1.0 : qcpu::instruction_estimate(gates, n);
        m_value = qcpu::m_required(estimate, *epsilon);
    }
    const qcpu::QcpuConfig config(n, m_value);

    const qcpu::CompiledProgram compiled = qcpu::compile_circuit(config, gates);
    write_file(out_path, qcpu::emit_asm(compiled.program));

    const std::string report =
        qcpu::compile_report(config, compiled, qcpu::per_gate_costs(config, gates));
    write_file(report_path.empty() ? out_path + ".report" : report_path, report);
    return 0;
}

int cmd_check(const std::string& program_path, const std::string& unitary_path,
              const std::string& report_path, int trials, std::uint64_t seed) {
    const qcpu::Program program = qcpu::parse_program(read_file(program_path));
    const qcpu::GateMatrix ideal = qcpu::read_unitary(read_file(unitary_path));

    // The exact per-rotation deltas live in the compile report; a bare
    // program only reveals how many rotations it performs, so without the
    // report the bound is the per-instruction worst case.
    qcpu::CompiledProgram compiled;
    compiled.program = program;
    std::string bound_source;
    if (!report_path.empty()) {
        compiled.angle_errors = qcpu::parse_report_deltas(read_file(report_path));
        bound_source = "report";
    } else {
        for (const qcpu::Instruction& instr : program.instructions)
            if (instr.alpha != 0)
                compiled.angle_errors.push_back(std::ldexp(qcpu::kPi, -program.config.m));
        bound_source = "worst_case";
    }

    const qcpu::ErrorReport report =
        qcpu::empirical_deviation(ideal, compiled, program.config, trials, seed);
    const double paper_bound = 2.0 * static_cast<double>(report.per_instruction_delta.size()) *
                               std::ldexp(qcpu::kTwoPi, -program.config.m);
    std::cout << "bound=" << qcpu::format_double(report.bound) << "\n"
              << "bound_source=" << bound_source << "\n"
              << "per_angle_worst_case_bound=" << qcpu::format_double(paper_bound) << "\n"
              << "empirical=" << qcpu::format_double(report.empirical_max_deviation) << "\n"
              << "opdist=" << qcpu::format_double(report.operator_distance) << "\n"
              << "samples=" << report.samples << "\n"
              << "ok=" << (report.bound_holds ? "true" : "false") << "\n";
    return 0;
}

int cmd_bound(std::optional<double> count, std::optional<int> n, double epsilon) {
    if (n) {
        const qcpu::ProgramSizing sizing = qcpu::m_required_for_data_qubits(*n, epsilon);
        std::cout << "N=" << qcpu::format_double(sizing.instruction_count) << "\n"
                  << "m=" << sizing.m << "\n"
                  << "asymptotic_m=" << qcpu::format_double(sizing.asymptotic_m) << "\n";
    } else {
        std::cout << "m=" << qcpu::m_required(*count, epsilon) << "\n";
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Toolchain for the fixed programmable gate array: assembler, "
                 "virtual machine, compiler and error analysis"};
    app.require_subcommand(1);

    std::string in_path, out_path, report_path, unitary_path;
    int n = 0, m = 0;
    RunOptions run_options;
    int trials = 100;
    std::uint64_t seed = 0;
    double epsilon = 0.0, big_n = 0.0;

    CLI::App* asm_cmd = app.add_subcommand("asm", "Assemble a program to bit lists");
    asm_cmd->add_option("--in", in_path, "assembly file")->required();
    asm_cmd->add_option("--out", out_path, "bit-list output file")->required();

    CLI::App* disasm_cmd = app.add_subcommand("disasm", "Disassemble bit lists");
    disasm_cmd->add_option("--in", in_path, "bit-list file")->required();
    disasm_cmd->add_option("--out", out_path, "assembly output file")->required();
    disasm_cmd->add_option("--n", n, "data qubits")->required();
    disasm_cmd->add_option("--m", m, "angle-code bits")->required();

    CLI::App* run_cmd = app.add_subcommand("run", "Execute a program");
    run_cmd->add_option("--in", run_options.program_path, "program file")->required();
    run_cmd->add_option("initial_state", run_options.state_path,
                        "initial data state file (or pass --zero)");
    run_cmd->add_flag("--zero", run_options.zero, "start from |0...0>");
    run_cmd->add_option("--mode", run_options.mode, "one, two or hybrid")
        ->check(CLI::IsMember({"one", "two", "hybrid"}));
    run_cmd->add_option("--out", run_options.out_path, "final state file")->required();
    run_cmd->add_option("--trace", run_options.trace_path, "per-step trace file");
    run_cmd->add_option("--seed", run_options.seed, "random seed (reserved)");

    CLI::App* compile_cmd = app.add_subcommand("compile", "Compile a circuit to a program");
    compile_cmd->add_option("--in", in_path, "circuit file")->required();
    compile_cmd->add_option("--out", out_path, "program output file")->required();
    compile_cmd->add_option("--report", report_path, "error report file (default <out>.report)");
    compile_cmd->add_option("--n", n, "data qubits")->required();
    CLI::Option* m_opt = compile_cmd->add_option("--m", m, "angle-code bits");
    CLI::Option* eps_opt =
        compile_cmd->add_option("--epsilon", epsilon, "target accuracy (sizes m)");
    m_opt->excludes(eps_opt);

    CLI::App* check_cmd =
        app.add_subcommand("check", "Compare a program against a reference unitary");
    check_cmd->add_option("--in", in_path, "program file")->required();
    check_cmd->add_option("reference", unitary_path, "reference unitary file")->required();
    check_cmd->add_option("--report", report_path, "compile report with exact deltas");
    check_cmd->add_option("--trials", trials, "random state pairs to sample");
    check_cmd->add_option("--seed", seed, "random seed");

    CLI::App* bound_cmd =
        app.add_subcommand("bound", "Angle-code bits needed for a target accuracy");
    CLI::Option* count_opt =
        bound_cmd->add_option("--N", big_n, "instruction-count estimate");
    CLI::Option* n_opt = bound_cmd->add_option("--n", n, "data qubits (uses N = n^4*4^n)");
    bound_cmd->add_option("--epsilon", epsilon, "target accuracy")->required();
    count_opt->excludes(n_opt);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (app.got_subcommand(asm_cmd))
            return cmd_asm(in_path, out_path);
        if (app.got_subcommand(disasm_cmd))
            return cmd_disasm(in_path, out_path, n, m);
        if (app.got_subcommand(run_cmd)) {
            if (run_options.zero != run_options.state_path.empty())
                throw qcpu::ParseError(
                    "pass exactly one of --zero or an initial state file");
            return cmd_run(run_options);
        }
        if (app.got_subcommand(compile_cmd)) {
            if (m_opt->count() == 0 && eps_opt->count() == 0)
                throw qcpu::ParseError("pass --m or --epsilon");
            return cmd_compile(in_path, out_path, report_path, n,
                               m_opt->count() ? std::optional<int>(m) : std::nullopt,
                               eps_opt->count() ? std::optional<double>(epsilon)
                                                : std::nullopt);
        }
        if (app.got_subcommand(check_cmd))
            return cmd_check(in_path, unitary_path, report_path, trials, seed);
        if (app.got_subcommand(bound_cmd)) {
            if (count_opt->count() == 0 && n_opt->count() == 0)
                throw qcpu::ParseError("pass --N or --n");
            return cmd_bound(count_opt->count() ? std::optional<double>(big_n) : std::nullopt,
                             n_opt->count() ? std::optional<int>(n) : std::nullopt, epsilon);
        }
    } catch (const qcpu::ResourceLimitError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 2;
}
