#!/usr/bin/env node
import { runPol } from "./chart.js";

process.exit(runPol(process.argv.slice(2)));
