#include <sparsepsi/cli.hpp>

int main(int argc, char** argv)
{
    return sparsepsi::run_cli(std::vector<std::string>(argv, argv + argc));
}
