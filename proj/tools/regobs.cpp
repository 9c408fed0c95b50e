#include "regobs/cli.hpp"

int main(int argc, char ** argv)
{
    return regobs::run_cli(argc, argv);
}
