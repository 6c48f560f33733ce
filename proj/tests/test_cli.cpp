#include <catch2/catch_amalgamated.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <sys/wait.h>

#include "qcpu/analysis.hpp"
#include "qcpu/core.hpp"
#include "qcpu/gates.hpp"

namespace fs = std::filesystem;

namespace {

struct CommandResult {
    int exit_code = -1;
    std::string output; // stdout
};

const fs::path& work_dir() {
    static const fs::path dir = [] {
        fs::path d = fs::temp_directory_path() / "qcpu_cli_tests";
        fs::remove_all(d);
        fs::create_directories(d);
        return d;
    }();
    return dir;
}

CommandResult run_cli(const std::string& args) {
    const fs::path out = work_dir() / "stdout.txt";
    const fs::path err = work_dir() / "stderr.txt";
    const std::string command = std::string(QCPU_CLI_PATH) + " " + args + " > " +
                                out.string() + " 2> " + err.string();
    const int status = std::system(command.c_str());
    CommandResult result;
    result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    std::ifstream in(out);
    std::ostringstream buffer;
    buffer << in.rdbuf();
    result.output = buffer.str();
    return result;
}

std::string slurp(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

fs::path write(const std::string& name, const std::string& content) {
    const fs::path path = work_dir() / name;
    std::ofstream out(path, std::ios::binary);
    out << content;
    return path;
}

std::string value_of(const std::string& report, const std::string& key) {
    for (const auto line : qcpu::detail::split_lines(report)) {
        if (line.starts_with(key + "="))
            return std::string(line.substr(key.size() + 1));
    }
    FAIL("missing key " << key << " in:\n" << report);
    return {};
}

} // namespace

TEST_CASE("asm and disasm round trip", "[cli]") {
    const fs::path asm_in = write("prog.qasm", "qcpu n=2 m=3\n"
                                               "RX 6\n"
                                               "RZ 5\n"
                                               "CNOT 2 1\n"
                                               "NOP\n");
    const fs::path bits = work_dir() / "prog.bits";
    REQUIRE(run_cli("asm --in " + asm_in.string() + " --out " + bits.string()).exit_code == 0);
    REQUIRE(slurp(bits) == "001100\n001011\n110000\n000000\n");

    const fs::path back = work_dir() / "prog_back.qasm";
    REQUIRE(run_cli("disasm --in " + bits.string() + " --out " + back.string() +
                    " --n 2 --m 3")
                .exit_code == 0);
    REQUIRE(slurp(back) == "qcpu n=2 m=3\nRX 6\nRZ 5\nCNOT 2 1\nNOP\n");

    const fs::path bits2 = work_dir() / "prog2.bits";
    REQUIRE(run_cli("asm --in " + back.string() + " --out " + bits2.string()).exit_code == 0);
    REQUIRE(slurp(bits2) == slurp(bits));
}

TEST_CASE("asm of an empty program yields an empty file", "[cli]") {
    const fs::path asm_in = write("empty.qasm", "qcpu n=2 m=3\n");
    const fs::path bits = work_dir() / "empty.bits";
    REQUIRE(run_cli("asm --in " + asm_in.string() + " --out " + bits.string()).exit_code == 0);
    REQUIRE(slurp(bits).empty());
}

TEST_CASE("run executes the swap program", "[cli]") {
    const fs::path prog = write("swap.qasm", "qcpu n=2 m=3\n100000\n110000\n100000\n");

    SECTION("|01> becomes |10>") {
        const fs::path init = write("init01.txt",
                                    qcpu::write_statevector(qcpu::Statevector::basis(2, 1)));
        const fs::path out = work_dir() / "final.txt";
        const fs::path trace = work_dir() / "trace.txt";
        REQUIRE(run_cli("run --in " + prog.string() + " " + init.string() + " --out " +
                        out.string() + " --trace " + trace.string())
                    .exit_code == 0);
        REQUIRE(slurp(out) == qcpu::write_statevector(qcpu::Statevector::basis(2, 2)));
        const std::string trace_text = slurp(trace);
        REQUIRE(trace_text.starts_with("step=1 program=100000 checksum="));
        REQUIRE(qcpu::detail::split_lines(trace_text).size() == 3);
    }

    SECTION("--zero stays at |00>") {
        const fs::path out = work_dir() / "final_zero.txt";
        REQUIRE(run_cli("run --in " + prog.string() + " --zero --out " + out.string())
                    .exit_code == 0);
        REQUIRE(slurp(out) == qcpu::write_statevector(qcpu::Statevector::basis(2, 0)));
    }

    SECTION("mode one and hybrid are byte-identical") {
        const fs::path init = write("initr.txt", [] {
            qcpu::Rng rng(77);
            return qcpu::write_statevector(qcpu::random_statevector(2, rng));
        }());
        const fs::path prog_mixed =
            write("mixed.qasm", "qcpu n=2 m=3\nRX 3\n100000\nRZ 7\n101101\nCNOT 2 1\n");
        const fs::path out_one = work_dir() / "one.txt";
        const fs::path out_hybrid = work_dir() / "hybrid.txt";
        const fs::path trace_one = work_dir() / "one.trace";
        const fs::path trace_hybrid = work_dir() / "hybrid.trace";
        REQUIRE(run_cli("run --in " + prog_mixed.string() + " " + init.string() +
                        " --mode one --out " + out_one.string() + " --trace " +
                        trace_one.string())
                    .exit_code == 0);
        REQUIRE(run_cli("run --in " + prog_mixed.string() + " " + init.string() +
                        " --mode hybrid --out " + out_hybrid.string() + " --trace " +
                        trace_hybrid.string())
                    .exit_code == 0);
        REQUIRE(slurp(out_one) == slurp(out_hybrid));
        REQUIRE(slurp(trace_one) == slurp(trace_hybrid));
    }

    SECTION("mode two emits the joint state") {
        const fs::path single = write("single.qasm", "qcpu n=2 m=3\n100000\n");
        const fs::path init = write("init10.txt",
                                    qcpu::write_statevector(qcpu::Statevector::basis(2, 2)));
        const fs::path out = work_dir() / "joint.txt";
        REQUIRE(run_cli("run --in " + single.string() + " " + init.string() +
                        " --mode two --out " + out.string())
                    .exit_code == 0);
        const qcpu::Statevector joint = qcpu::read_statevector(slurp(out));
        REQUIRE(joint.num_qubits == 8);
        // |100000>|11> = index 0b10000011 = 131
        REQUIRE(std::abs(joint.amplitudes[131] - 1.0) < 1e-12);
    }

    SECTION("identical invocations are byte-identical") {
        const fs::path init = write("initd.txt", [] {
            qcpu::Rng rng(5);
            return qcpu::write_statevector(qcpu::random_statevector(2, rng));
        }());
        const fs::path out_a = work_dir() / "det_a.txt";
        const fs::path out_b = work_dir() / "det_b.txt";
        REQUIRE(run_cli("run --in " + prog.string() + " " + init.string() + " --out " +
                        out_a.string())
                    .exit_code == 0);
        REQUIRE(run_cli("run --in " + prog.string() + " " + init.string() + " --out " +
                        out_b.string())
                    .exit_code == 0);
        REQUIRE(slurp(out_a) == slurp(out_b));
    }
}

TEST_CASE("compile", "[cli]") {
    SECTION("single adjacent CNOT") {
        const fs::path circuit = write("cnot.circuit", "CNOT 1 2\n");
        const fs::path prog = work_dir() / "cnot.qasm";
        REQUIRE(run_cli("compile --in " + circuit.string() + " --out " + prog.string() +
                        " --n 2 --m 3")
                    .exit_code == 0);
        REQUIRE(slurp(prog) == "qcpu n=2 m=3\nCNOT 1 2\n");
        REQUIRE(value_of(slurp(prog.string() + ".report"), "deviation_bound") == "0");
    }

    SECTION("empty circuit") {
        const fs::path circuit = write("empty.circuit", "# nothing\n");
        const fs::path prog = work_dir() / "empty_prog.qasm";
        REQUIRE(run_cli("compile --in " + circuit.string() + " --out " + prog.string() +
                        " --n 2 --m 3")
                    .exit_code == 0);
        REQUIRE(slurp(prog) == "qcpu n=2 m=3\n");
        REQUIRE(value_of(slurp(prog.string() + ".report"), "deviation_bound") == "0");
    }

    SECTION("grid-aligned x rotation compiles to one RX with zero bound") {
        const qcpu::GateMatrix rx = qcpu::rotation_x(3.0 * qcpu::kPi / 2.0);
        std::string line = "U1Q 1";
        for (std::size_t i = 0; i < 4; ++i)
            line += " " + qcpu::format_double(rx.entries[i].real()) + " " +
                    qcpu::format_double(rx.entries[i].imag());
        const fs::path circuit = write("rx.circuit", line + "\n");
        const fs::path prog = work_dir() / "rx.qasm";
        REQUIRE(run_cli("compile --in " + circuit.string() + " --out " + prog.string() +
                        " --n 2 --m 3")
                    .exit_code == 0);
        REQUIRE(slurp(prog) == "qcpu n=2 m=3\nRX 6\n");
        REQUIRE(value_of(slurp(prog.string() + ".report"), "deviation_bound") == "0");
    }

    SECTION("--epsilon sizes m") {
        const fs::path circuit = write("eps.circuit", "CNOT 1 2\n");
        const fs::path prog = work_dir() / "eps.qasm";
        REQUIRE(run_cli("compile --in " + circuit.string() + " --out " + prog.string() +
                        " --n 2 --epsilon 0.01")
                    .exit_code == 0);
        // N = 1: smallest m with 2pi/2^m <= 0.01 is m = 10.
        REQUIRE(slurp(prog).starts_with("qcpu n=2 m=10\n"));
    }
}

TEST_CASE("check", "[cli]") {
    SECTION("exact swap against the SWAP matrix") {
        const fs::path prog = write("swap2.qasm", "qcpu n=2 m=3\n100000\n110000\n100000\n");
        qcpu::GateMatrix swap_on_pair = qcpu::GateMatrix::identity(2);
        swap_on_pair.at(1, 1) = swap_on_pair.at(2, 2) = 0.0;
        swap_on_pair.at(1, 2) = swap_on_pair.at(2, 1) = 1.0;
        const fs::path ref = write("swap.unitary", qcpu::write_unitary(swap_on_pair));
        const CommandResult result =
            run_cli("check --in " + prog.string() + " " + ref.string() + " --trials 50");
        REQUIRE(result.exit_code == 0);
        REQUIRE(value_of(result.output, "bound") == "0");
        REQUIRE(std::stod(value_of(result.output, "empirical")) <= 1e-12);
        REQUIRE(value_of(result.output, "ok") == "true");
    }

    SECTION("compiled program with its report satisfies the bound") {
        std::string circuit_text;
        qcpu::GateMatrix ideal = qcpu::GateMatrix::identity(2);
        const qcpu::GateMatrix cnot_full = qcpu::cnot_first_control();
        for (int g = 0; g < 3; ++g) {
            // grid-free rotations so every angle carries quantization error
            const qcpu::GateMatrix u =
                qcpu::matmul(qcpu::rotation_z(0.3 + g), qcpu::rotation_x(0.9 + 0.2 * g));
            std::string line = "U1Q 1";
            for (std::size_t i = 0; i < 4; ++i)
                line += " " + qcpu::format_double(u.entries[i].real()) + " " +
                        qcpu::format_double(u.entries[i].imag());
            circuit_text += line + "\nCNOT 1 2\n";
            qcpu::GateMatrix u_on_pair = qcpu::GateMatrix::zero(2); // u ⊗ I
            for (int r = 0; r < 2; ++r)
                for (int c = 0; c < 2; ++c)
                    for (int k = 0; k < 2; ++k)
                        u_on_pair.at(2 * r + k, 2 * c + k) = u.at(r, c);
            ideal = qcpu::matmul(cnot_full, qcpu::matmul(u_on_pair, ideal));
        }
        const fs::path circuit = write("rand.circuit", circuit_text);
        const fs::path ref = write("rand.unitary", qcpu::write_unitary(ideal));
        const fs::path prog = work_dir() / "rand.qasm";
        const fs::path report = work_dir() / "rand.report";
        REQUIRE(run_cli("compile --in " + circuit.string() + " --out " + prog.string() +
                        " --report " + report.string() + " --n 2 --m 6")
                    .exit_code == 0);
        const CommandResult result =
            run_cli("check --in " + prog.string() + " " + ref.string() + " --report " +
                    report.string() + " --trials 200 --seed 9");
        REQUIRE(result.exit_code == 0);
        REQUIRE(value_of(result.output, "bound_source") == "report");
        REQUIRE(value_of(result.output, "ok") == "true");
        REQUIRE(std::stod(value_of(result.output, "empirical")) <=
                std::stod(value_of(result.output, "bound")));
    }
}

TEST_CASE("bound", "[cli]") {
    const CommandResult one = run_cli("bound --N 1 --epsilon 6.283185307179586");
    REQUIRE(one.exit_code == 0);
    REQUIRE(one.output == "m=1\n");

    const CommandResult big = run_cli("bound --N 1000 --epsilon 0.01");
    REQUIRE(big.output == "m=20\n");

    const CommandResult by_n = run_cli("bound --n 2 --epsilon 0.01");
    REQUIRE(value_of(by_n.output, "N") == "256");
    REQUIRE(value_of(by_n.output, "m") ==
            std::to_string(qcpu::m_required(256.0, 0.01)));
}

TEST_CASE("exit codes", "[cli]") {
    SECTION("user errors exit 2") {
        const fs::path bad = write("bad.qasm", "qcpu n=2 m=3\nRX 99\n");
        const fs::path out = work_dir() / "never.bits";
        REQUIRE(run_cli("asm --in " + bad.string() + " --out " + out.string()).exit_code ==
                2);
        REQUIRE(run_cli("asm --in /nonexistent --out " + out.string()).exit_code == 2);
        REQUIRE(run_cli("nonsense").exit_code == 2);
        const fs::path wrong_width = write("w.txt", qcpu::write_statevector(
                                                        qcpu::Statevector::basis(3, 0)));
        const fs::path prog = write("swap3.qasm", "qcpu n=2 m=3\n100000\n");
        REQUIRE(run_cli("run --in " + prog.string() + " " + wrong_width.string() +
                        " --out " + out.string())
                    .exit_code == 2);
    }

    SECTION("memory guard exits 3") {
        // 5 mode-two registers of width 6 plus 2 data qubits = 32 > 24.
        const fs::path prog = write("long.qasm", "qcpu n=2 m=3\n"
                                                 "NOP\nNOP\nNOP\nNOP\nNOP\n");
        const fs::path out = work_dir() / "never2.txt";
        REQUIRE(run_cli("run --in " + prog.string() + " --zero --mode two --out " +
                        out.string())
                    .exit_code == 3);
    }
}
